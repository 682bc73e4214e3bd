#include "painmine/errors.hpp"
#include "painmine/log.hpp"
#include "painmine/pipeline.hpp"
#include "painmine/synth.hpp"
#include "painmine/util.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace painmine;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string input_override;
    std::string output_override;
    int64_t seed_override = -1;
};

void add_common(CLI::App* cmd, CommonOptions& options) {
    cmd->add_option("-c,--config", options.config_path, "pipeline configuration file")
        ->required();
    cmd->add_option("--input", options.input_override, "override paths.input");
    cmd->add_option("--output-dir", options.output_override, "override paths.output_dir");
    cmd->add_option("--seed", options.seed_override, "override run.seed");
}

PipelineConfig make_config(const CommonOptions& options) {
    PipelineConfig config = load_pipeline_config(options.config_path);
    if (!options.input_override.empty()) config.input = options.input_override;
    if (!options.output_override.empty()) config.output_dir = options.output_override;
    if (options.seed_override >= 0) {
        config.seed = static_cast<uint64_t>(options.seed_override);
        config.sentiment.seed = config.seed;
        config.itm.train.seed = config.seed + 1;
    }
    return config;
}

void print_stage(const StageResult& result) {
    std::printf("stage %-12s ok  (%.1f ms)\n", result.name.c_str(), result.millis);
    for (const auto& path : result.artifacts) std::printf("  wrote %s\n", path.c_str());
}

int run_one_stage(const std::string& name, const CommonOptions& options) {
    print_stage(run_stage(name, make_config(options)));
    return 0;
}

int run_all(const CommonOptions& options) {
    RunManifest manifest = run_pipeline(make_config(options));
    for (const auto& stage : manifest.stages) print_stage(stage);
    if (!manifest.failed_stage.empty()) {
        std::fprintf(stderr, "error in stage '%s': %s\n", manifest.failed_stage.c_str(),
                     manifest.error.c_str());
        return 1;
    }
    std::printf("pipeline complete (config hash %s)\n", manifest.config_hash.c_str());
    return 0;
}

int run_synth(const std::string& out_dir, uint64_t seed, int docs_per_topic,
              double negative_fraction, double noise_rate) {
    GeneratorSpec spec = GeneratorSpec::defaults();
    spec.seed = seed;
    spec.docs_per_topic = docs_per_topic;
    spec.negative_fraction = negative_fraction;
    spec.noise_rate = noise_rate;
    SynthResult result = generate(spec);

    fs::create_directories(fs::path(out_dir));
    const std::string corpus_path = (fs::path(out_dir) / "corpus.jsonl").string();
    const std::string truth_path = (fs::path(out_dir) / "truth.jsonl").string();
    const std::string stopword_path = (fs::path(out_dir) / "stopwords.txt").string();
    const std::string config_path = (fs::path(out_dir) / "painmine.conf").string();
    write_file(corpus_path, reviews_to_jsonl(result.reviews));
    write_file(truth_path, truth_to_jsonl(result.truth));
    write_file(stopword_path, default_stopwords_text());
    std::string config_text = "[paths]\n";
    config_text += "input = " + corpus_path + "\n";
    config_text += "stopwords = " + stopword_path + "\n";
    config_text += "output_dir = " + (fs::path(out_dir) / "out").string() + "\n\n";
    // One refinement epoch per relabeling step leaves the classifier too
    // uncertain to clear the recall-scaled thresholds on a corpus this small,
    // so the generated config trains a little harder per step.
    config_text += "[itm]\nepochs_per_step = 4\n\n";
    config_text += "[run]\nseed = " + std::to_string(seed) + "\n";
    write_file(config_path, config_text);

    std::printf("generated %zu reviews across %zu topics\n", result.reviews.size(),
                spec.topics.size());
    for (const auto& path : {corpus_path, truth_path, stopword_path, config_path})
        std::printf("  wrote %s\n", path.c_str());
    return 0;
}

int run_init_config(const std::string& config_path, const std::string& stopword_path) {
    write_file(config_path, default_config_text());
    write_file(stopword_path, default_stopwords_text());
    std::printf("wrote %s\nwrote %s\n", config_path.c_str(), stopword_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pain-point mining over customer review corpora"};
    app.require_subcommand(1);

    CommonOptions options;
    std::vector<std::pair<std::string, std::string>> stages = {
        {"ingest", "read and validate the raw corpus"},
        {"preprocess", "normalize, tokenize, and filter reviews"},
        {"train-sent", "train the sentiment classifier"},
        {"topics-init", "embed documents and cluster into initial topics"},
        {"topics-merge", "merge keyword-sharing topics and fold minor ones"},
        {"itm", "iteratively refine topic labels with the topic classifier"},
        {"extract", "extract pain points via token attribution"},
        {"evaluate", "compute coherence and classification metrics"},
        {"report", "consolidate artifacts into the final report"},
    };
    for (auto& [name, description] : stages) add_common(app.add_subcommand(name, description), options);
    add_common(app.add_subcommand("run", "run every stage in order"), options);

    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled review corpus");
    std::string synth_out = "synth";
    uint64_t synth_seed = 0;
    int docs_per_topic = 200;
    double negative_fraction = 0.5;
    double noise_rate = 0.05;
    synth->add_option("-o,--out", synth_out, "output directory");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--docs-per-topic", docs_per_topic, "documents per topic")
        ->check(CLI::PositiveNumber);
    synth->add_option("--negative-fraction", negative_fraction,
                      "fraction of negative reviews per topic")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--noise-rate", noise_rate, "per-word chance of a noise token")
        ->check(CLI::Range(0.0, 1.0));

    auto* init = app.add_subcommand("init-config", "write a default config and stopword list");
    std::string init_config_path = "painmine.conf";
    std::string init_stopword_path = "stopwords.txt";
    init->add_option("-o,--out", init_config_path, "config file to write");
    init->add_option("--stopwords", init_stopword_path, "stopword file to write");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed())
            return run_synth(synth_out, synth_seed, docs_per_topic, negative_fraction,
                             noise_rate);
        if (init->parsed()) return run_init_config(init_config_path, init_stopword_path);
        for (const auto& [name, description] : stages) {
            if (app.get_subcommand(name)->parsed()) return run_one_stage(name, options);
        }
        if (app.get_subcommand("run")->parsed()) return run_all(options);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
