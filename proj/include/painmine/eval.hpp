#pragma once

#include "painmine/topics.hpp"

#include <map>
#include <string>
#include <vector>

namespace painmine {

// Document-level co-occurrence: the window is the whole document. Joint
// counts are computed on demand from per-word posting lists.
struct CooccurrenceCounts {
    std::map<std::string, std::vector<int>> postings; // sorted, unique doc indices
    size_t total_docs = 0;

    size_t df(const std::string& word) const;
    size_t joint(const std::string& a, const std::string& b) const;
    bool seen(const std::string& word) const { return postings.count(word) > 0; }
};

CooccurrenceCounts count_cooccurrence(const std::vector<std::vector<std::string>>& docs);

// ln(P(a,b) / (P(a) P(b))); zero joint count yields -infinity.
double pmi(const std::string& a, const std::string& b, const CooccurrenceCounts& counts);

// PMI / (-ln P(a,b)), in [-1, 1]. Zero joint count -> -1; a pair that
// co-occurs in every document -> 1 by continuity.
double npmi(const std::string& a, const std::string& b, const CooccurrenceCounts& counts);

struct CoherenceReport {
    std::map<int, double> per_topic; // mean pairwise NPMI over top-r words
    std::vector<int> skipped;        // topics with fewer than 2 scorable words
    double mean = 0.0;               // plain average over scored topics
};

CoherenceReport topic_coherence(const std::vector<TopicSummary>& summaries,
                                const CooccurrenceCounts& counts, int top_r = 10);

double outlier_ratio(const TopicAssignment& assignment);

struct ClassificationReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::map<int, double> precision;
    std::map<int, double> recall;
    std::map<int, double> f1;
    std::map<int, size_t> support;
};

ClassificationReport classification_report(const std::vector<int>& predictions,
                                           const std::vector<int>& golds);

} // namespace painmine
