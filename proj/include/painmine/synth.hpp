#pragma once

#include "painmine/corpus.hpp"
#include "painmine/topics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace painmine {

struct TopicSpec {
    std::string name;
    std::vector<std::string> keywords; // pairwise disjoint across topics
    std::vector<std::string> fillers;  // topic-flavored filler phrases
};

struct GeneratorSpec {
    std::vector<TopicSpec> topics;
    std::vector<std::string> carriers; // phrases with {kw}/{kw2} slots
    std::vector<std::string> positive_templates;
    std::vector<std::string> negative_templates; // carry the global pain nouns
    std::vector<std::string> positive_slots;     // phrases with a {kw} slot
    std::vector<std::string> negative_slots;
    std::vector<std::string> mentions; // neutral {kw} phrases for the rest of the bank
    int docs_per_topic = 200;
    double negative_fraction = 0.5;
    double noise_rate = 0.05;
    uint64_t seed = 0;

    // 5 topics x 3 planted keywords, 5 global pain nouns in the negative
    // templates, phrase banks shaped so noun chunks stay short.
    static GeneratorSpec defaults();
};

struct DocTruth {
    std::string doc_id;
    int topic = 0; // 1-based topic id
    std::string topic_name;
    Sentiment sentiment = Sentiment::Positive;
    std::vector<std::string> planted; // sampled topic keywords, subset of tokens
};

struct SynthResult {
    std::vector<RawReview> reviews;
    std::vector<DocTruth> truth;
};

SynthResult generate(const GeneratorSpec& spec);

TopicAssignment truth_assignment(const SynthResult& result);

// Relabels exactly round(outlier_rate*n) docs to OUTLIER and
// round(flip_rate*n) docs to a uniformly random wrong topic.
TopicAssignment corrupt_assignment(const TopicAssignment& truth, double outlier_rate,
                                   double flip_rate, uint64_t seed);

std::string truth_to_jsonl(const std::vector<DocTruth>& truth);
std::vector<DocTruth> truth_from_jsonl(const std::string& text);

std::string reviews_to_jsonl(const std::vector<RawReview>& reviews);

} // namespace painmine
