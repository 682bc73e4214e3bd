#include <doctest.h>

#include "painmine/errors.hpp"
#include "painmine/features.hpp"
#include "painmine/synth.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace painmine;

TEST_SUITE("synth") {

TEST_CASE("the same seed generates identical corpora") {
    auto spec = GeneratorSpec::defaults();
    spec.docs_per_topic = 40;
    spec.seed = 21;
    auto a = generate(spec);
    auto b = generate(spec);
    CHECK(reviews_to_jsonl(a.reviews) == reviews_to_jsonl(b.reviews));
    CHECK(truth_to_jsonl(a.truth) == truth_to_jsonl(b.truth));
    spec.seed = 22;
    auto c = generate(spec);
    CHECK(reviews_to_jsonl(a.reviews) != reviews_to_jsonl(c.reviews));
}

TEST_CASE("every generated doc is long enough and mentions its planted keywords") {
    auto spec = GeneratorSpec::defaults();
    spec.docs_per_topic = 30;
    spec.seed = 5;
    auto result = generate(spec);
    REQUIRE(result.reviews.size() == result.truth.size());
    REQUIRE(result.reviews.size() == 30 * spec.topics.size());
    std::set<std::string> ids;
    for (size_t i = 0; i < result.reviews.size(); ++i) {
        const auto& review = result.reviews[i];
        const auto& truth = result.truth[i];
        CHECK(review.id == truth.doc_id);
        ids.insert(review.id);
        auto tokens = tokenize(review.text);
        CHECK(tokens.size() >= 10);
        CHECK(truth.planted.size() >= 2);
        std::set<std::string> bag(tokens.begin(), tokens.end());
        for (const auto& kw : truth.planted) CHECK(bag.count(kw) == 1);
        CHECK(review.sentiment.has_value());
        CHECK(review.sentiment == truth.sentiment);
    }
    CHECK(ids.size() == result.reviews.size()); // unique ids
    // Texts are unique too.
    std::set<std::string> texts;
    for (const auto& review : result.reviews) texts.insert(review.text);
    CHECK(texts.size() == result.reviews.size());
}

TEST_CASE("negative fraction is honored exactly per topic") {
    auto spec = GeneratorSpec::defaults();
    spec.docs_per_topic = 40;
    spec.negative_fraction = 0.25;
    spec.seed = 6;
    auto result = generate(spec);
    std::map<int, int> negatives;
    for (const auto& truth : result.truth)
        if (truth.sentiment == Sentiment::Negative) negatives[truth.topic] += 1;
    for (size_t t = 1; t <= spec.topics.size(); ++t)
        CHECK(negatives[static_cast<int>(t)] == 10); // round(0.25 * 40)
}

TEST_CASE("planted pair rates stay within ten percent of the sampling design") {
    // Each doc plants an ordered pair of distinct keywords drawn uniformly
    // from its three-word bank, so a given keyword joins the pair in two
    // thirds of its topic's docs.
    auto spec = GeneratorSpec::defaults();
    spec.docs_per_topic = 200; // 1000 docs total
    spec.seed = 7;
    auto result = generate(spec);
    std::map<std::string, int> pair_counts;
    std::map<int, int> topic_docs;
    for (const auto& truth : result.truth) {
        topic_docs[truth.topic] += 1;
        for (const auto& kw : truth.planted) pair_counts[kw] += 1;
    }
    for (size_t t = 0; t < spec.topics.size(); ++t) {
        for (const auto& kw : spec.topics[t].keywords) {
            double rate = static_cast<double>(pair_counts[kw]) /
                          topic_docs[static_cast<int>(t) + 1];
            CHECK_MESSAGE(std::abs(rate - 2.0 / 3.0) <= 0.1 * (2.0 / 3.0),
                          kw << " rate " << rate);
        }
    }
    // And every bank keyword is mentioned in every doc of its topic.
    for (size_t i = 0; i < result.reviews.size(); ++i) {
        auto tokens = tokenize(result.reviews[i].text);
        std::set<std::string> bag(tokens.begin(), tokens.end());
        for (const auto& kw : spec.topics[result.truth[i].topic - 1].keywords)
            CHECK(bag.count(kw) == 1);
    }
}

TEST_CASE("keyword banks must be disjoint and phrase banks non-empty") {
    auto spec = GeneratorSpec::defaults();
    spec.topics[0].keywords.push_back(spec.topics[1].keywords[0]);
    CHECK_THROWS_AS(generate(spec), ConfigError);

    auto no_carriers = GeneratorSpec::defaults();
    no_carriers.carriers.clear();
    CHECK_THROWS_AS(generate(no_carriers), ConfigError);
}

TEST_CASE("truth assignment mirrors the generated topics") {
    auto spec = GeneratorSpec::defaults();
    spec.docs_per_topic = 10;
    auto result = generate(spec);
    auto truth = truth_assignment(result);
    REQUIRE(truth.labels.size() == result.truth.size());
    for (size_t i = 0; i < truth.labels.size(); ++i) {
        CHECK(truth.labels[i] == result.truth[i].topic);
        CHECK(truth.doc_ids[i] == result.truth[i].doc_id);
    }
}

TEST_CASE("corruption hits the exact requested counts") {
    auto spec = GeneratorSpec::defaults();
    spec.docs_per_topic = 200;
    auto truth = truth_assignment(generate(spec)); // 1000 docs, labels 1..5
    auto corrupted = corrupt_assignment(truth, 0.3, 0.1, 99);
    REQUIRE(corrupted.labels.size() == truth.labels.size());
    size_t outliers = 0, flipped = 0, kept = 0;
    for (size_t i = 0; i < truth.labels.size(); ++i) {
        if (corrupted.labels[i] == kOutlierTopic) {
            ++outliers;
        } else if (corrupted.labels[i] != truth.labels[i]) {
            ++flipped;
            CHECK(corrupted.labels[i] >= 1);
            CHECK(corrupted.labels[i] <= truth.num_topics());
        } else {
            ++kept;
        }
    }
    CHECK(outliers == 300); // round(0.3 * 1000)
    CHECK(flipped == 100);  // round(0.1 * 1000)
    CHECK(kept == 600);
}

TEST_CASE("corruption is deterministic and validates its rates") {
    TopicAssignment truth;
    for (int i = 0; i < 50; ++i) {
        truth.doc_ids.push_back("d" + std::to_string(i));
        truth.labels.push_back(1 + i % 3);
    }
    auto a = corrupt_assignment(truth, 0.2, 0.1, 7);
    auto b = corrupt_assignment(truth, 0.2, 0.1, 7);
    CHECK(a.labels == b.labels);
    CHECK_THROWS_AS(corrupt_assignment(truth, 0.8, 0.5, 1), ConfigError);
    CHECK_THROWS_AS(corrupt_assignment(truth, -0.1, 0.0, 1), ConfigError);
}

TEST_CASE("truth records round-trip through jsonl") {
    auto spec = GeneratorSpec::defaults();
    spec.docs_per_topic = 5;
    auto result = generate(spec);
    auto parsed = truth_from_jsonl(truth_to_jsonl(result.truth));
    REQUIRE(parsed.size() == result.truth.size());
    for (size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].doc_id == result.truth[i].doc_id);
        CHECK(parsed[i].topic == result.truth[i].topic);
        CHECK(parsed[i].topic_name == result.truth[i].topic_name);
        CHECK(parsed[i].sentiment == result.truth[i].sentiment);
        CHECK(parsed[i].planted == result.truth[i].planted);
    }
}

} // TEST_SUITE
