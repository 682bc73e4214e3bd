#pragma once

#include "painmine/chunker.hpp"
#include "painmine/features.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace painmine {

inline constexpr int kOutlierTopic = 0;

struct TopicAssignment {
    std::vector<std::string> doc_ids;
    std::vector<int> labels; // aligned with doc_ids; 0 = OUTLIER

    int num_topics() const; // M, the largest topic id
    std::map<int, size_t> sizes() const;
};

struct TopicSummary {
    int topic_id = 0;
    size_t size = 0;
    std::vector<std::pair<std::string, double>> words; // score-descending
    std::vector<std::string> keywords;                 // words with score >= s
};

struct MergeConfig {
    double s = 0.1;
    int top_r = 10;
    int min_topic_size = 5;
    bool noun_filter = true;
};

struct KMeansResult {
    std::vector<int> cluster;        // 0-based cluster index per doc
    Eigen::MatrixXd centroids;       // k x d, unit rows
    std::vector<double> similarity;  // cosine similarity to own centroid
};

// Spherical k-means: cosine distance on L2-normalized rows, seeded
// farthest-point initialization, deterministic tie-breaking.
KMeansResult cosine_kmeans(const Eigen::MatrixXd& embeddings, int k, uint64_t seed,
                           int max_iters = 100);

double mean_silhouette(const Eigen::MatrixXd& embeddings, const std::vector<int>& cluster);

// Best silhouette over the candidate k values (ties -> smaller k).
int choose_k(const Eigen::MatrixXd& embeddings, const std::vector<int>& candidates,
             uint64_t seed);

// Cluster, then label the floor(q * n) docs least similar to their
// centroid as OUTLIER; surviving clusters are renumbered 1..M.
TopicAssignment initial_topics(const Eigen::MatrixXd& embeddings,
                               const std::vector<std::string>& doc_ids, int k,
                               double outlier_quantile, uint64_t seed);

// Top-r terms per non-outlier topic by c-TF-IDF score (nouns only when
// noun_filter); keywords are the ones scoring at least s.
std::vector<TopicSummary> representative_words(const TopicAssignment& assignment,
                                               const CTfidfTable& table,
                                               const Vocabulary& vocab,
                                               const MergeConfig& config,
                                               const TaggerConfig& tagger);

struct MergeResult {
    TopicAssignment assignment;
    std::vector<TopicSummary> summaries;      // union-of-keyword summaries, renumbered
    std::map<int, int> old_to_new;            // non-outlier ids only
    std::vector<std::vector<int>> merged_groups; // old ids per new topic, ascending
};

// Connected components over the shares-a-keyword graph; each component
// collapses onto its lowest constituent id, then ids are renumbered
// densely. OUTLIER is untouched.
MergeResult merge_topics(const std::vector<TopicSummary>& summaries,
                         const TopicAssignment& assignment);

// Topics smaller than min_topic_size become OUTLIER; survivors are
// renumbered densely.
TopicAssignment adjust_minor_topics(const TopicAssignment& assignment, int min_topic_size);

std::string assignment_to_csv(const TopicAssignment& assignment);
TopicAssignment assignment_from_csv(const std::string& text);

std::string summaries_to_json(const std::vector<TopicSummary>& summaries);
std::vector<TopicSummary> summaries_from_json(const std::string& text);

} // namespace painmine
