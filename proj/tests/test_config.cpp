#include <doctest.h>

#include "painmine/errors.hpp"
#include "painmine/pipeline.hpp"
#include "painmine/util.hpp"

#include <string>

using namespace painmine;

TEST_SUITE("config") {

TEST_CASE("an empty config keeps the documented defaults") {
    auto config = parse_pipeline_config("");
    CHECK(config.filter.min_tokens == 10);
    CHECK(config.filter.dedupe);
    CHECK(config.filter.require_keyword);
    CHECK(config.min_negative_freq == 5);
    CHECK(config.sentiment.learning_rate == doctest::Approx(1e-2));
    CHECK(config.sentiment.batch_size == 64);
    CHECK(config.sentiment.optimizer == Optimizer::AdaptiveMoment);
    CHECK(config.sentiment.embed_dim == 64);
    CHECK(config.k == 0);
    CHECK(config.outlier_quantile == doctest::Approx(0.2));
    CHECK(config.svd_dim == 64);
    CHECK(config.merge.s == doctest::Approx(0.1));
    CHECK(config.merge.top_r == 10);
    CHECK(config.merge.min_topic_size == 5);
    CHECK(config.itm.tau == doctest::Approx(0.6));
    CHECK(config.itm.max_steps == 100);
    CHECK(config.itm.patience == 2);
    CHECK(config.itm.epochs_per_step == 1);
    CHECK(config.extract.g == 3);
    CHECK(config.extract.n_sentiment == 30);
    CHECK(config.extract.n_per_topic == 10);
    CHECK(config.extract.method == AttributionMethod::GradInput);
    CHECK(config.seed == 0);
}

TEST_CASE("the shipped default config text parses to the defaults") {
    auto config = parse_pipeline_config(default_config_text());
    CHECK(config.filter.min_tokens == 10);
    CHECK(config.itm.tau == doctest::Approx(0.6));
    CHECK(config.extract.g == 3);
    CHECK(config.output_dir == "out");
}

TEST_CASE("sections and keys override the defaults") {
    std::string text = "[paths]\n"
                       "input = reviews.jsonl\n"
                       "stopwords = stop.txt\n"
                       "output_dir = results\n"
                       "\n"
                       "[filter]\n"
                       "min_tokens = 4\n"
                       "dedupe = no\n"
                       "\n"
                       "[sentiment]\n"
                       "epochs = 25\n"
                       "optimizer = sgd\n"
                       "\n"
                       "[topics]\n"
                       "k = 6\n"
                       "outlier_quantile = 0.1\n"
                       "s = 0.05\n"
                       "\n"
                       "[itm]\n"
                       "tau = 0.4\n"
                       "epochs_per_step = 4\n"
                       "\n"
                       "[extract]\n"
                       "attribution = integrated_gradients\n"
                       "ig_steps = 16\n"
                       "\n"
                       "[run]\n"
                       "seed = 41\n";
    auto config = parse_pipeline_config(text);
    CHECK(config.input == "reviews.jsonl");
    CHECK(config.stopwords_path == "stop.txt");
    CHECK(config.output_dir == "results");
    CHECK(config.filter.min_tokens == 4);
    CHECK_FALSE(config.filter.dedupe);
    CHECK(config.sentiment.epochs == 25);
    CHECK(config.sentiment.optimizer == Optimizer::Sgd);
    CHECK(config.k == 6);
    CHECK(config.outlier_quantile == doctest::Approx(0.1));
    CHECK(config.merge.s == doctest::Approx(0.05));
    CHECK(config.itm.tau == doctest::Approx(0.4));
    CHECK(config.itm.epochs_per_step == 4);
    CHECK(config.extract.method == AttributionMethod::IntegratedGradients);
    CHECK(config.extract.ig_steps == 16);
    CHECK(config.seed == 41);
}

TEST_CASE("derived seeds and shared knobs are wired after parsing") {
    auto config = parse_pipeline_config("[run]\nseed = 41\n[topics]\ntop_r = 7\n");
    CHECK(config.sentiment.seed == 41);
    CHECK(config.itm.train.seed == 42);
    CHECK(config.itm.coherence_top_r == 7);
    CHECK(config.merge.top_r == 7);
}

TEST_CASE("comments and blank lines are ignored") {
    auto config = parse_pipeline_config("# a comment\n\n[run]\nseed = 9 \n");
    CHECK(config.seed == 9);
}

TEST_CASE("errors cite the offending line") {
    auto check_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_pipeline_config(text);
            FAIL_CHECK("expected a config error for: " << text);
        } catch (const ConfigError& e) {
            std::string message = e.what();
            CHECK_MESSAGE(message.find("config line") != std::string::npos, message);
            CHECK_MESSAGE(message.find(needle) != std::string::npos, message);
        }
    };
    check_error("[nope]\n", "nope");
    check_error("[filter]\nwhat = 1\n", "what");
    check_error("stray\n", "key = value");
    check_error("[filter]\nmin_tokens = many\n", "min_tokens");
    check_error("[itm]\ntau = 1.5\n", "tau");
    check_error("[itm]\ntau = 0\n", "tau");
    check_error("[topics]\noutlier_quantile = 1.0\n", "outlier_quantile");
    check_error("[sentiment]\nlearning_rate = -1\n", "learning_rate");
    check_error("[sentiment]\noptimizer = quantum\n", "optimizer");
    check_error("[extract]\ng = 0\n", "g");
    check_error("[paths]\nformat = yaml\n", "format");
}

TEST_CASE("keys outside any section are rejected") {
    CHECK_THROWS_AS(parse_pipeline_config("seed = 1\n"), ConfigError);
}

TEST_CASE("the default stopword list is non-trivial and one word per line") {
    auto text = default_stopwords_text();
    size_t words = 0;
    for (const auto& line : split_lines(text)) {
        if (line.empty()) continue;
        ++words;
        CHECK(line.find(' ') == std::string::npos);
    }
    CHECK(words >= 100);
    CHECK(text.find("the\n") != std::string::npos);
}

} // TEST_SUITE
