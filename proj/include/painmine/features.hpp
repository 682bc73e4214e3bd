#pragma once

#include "painmine/corpus.hpp"

#include <Eigen/Dense>

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace painmine {

// Lowercase, split on whitespace and punctuation; punctuation-only tokens
// are discarded. Bytes >= 0x80 are treated as word characters so UTF-8
// text stays intact.
std::vector<std::string> tokenize(const std::string& normalized_text);

struct Vocabulary {
    std::unordered_map<std::string, int> token_to_index;
    std::vector<std::string> index_to_token;

    int size() const { return static_cast<int>(index_to_token.size()); }
    // -1 when the token is unknown.
    int lookup(const std::string& token) const;
    // Fingerprint for model/corpus compatibility checks.
    std::string hash() const;
};

// First-occurrence order over kept reviews.
Vocabulary build_vocab(const std::vector<CleanReview>& corpus);

// In-vocabulary token indices, unknown tokens dropped, order preserved.
std::vector<int> map_tokens(const Vocabulary& vocab, const std::vector<std::string>& tokens);

struct DocTermCounts {
    std::vector<std::string> doc_ids;
    // Row per doc: (term index, count), sorted by term index.
    std::vector<std::vector<std::pair<int, int>>> rows;
    std::vector<int> doc_totals;
    int vocab_size = 0;
};

DocTermCounts count(const std::vector<CleanReview>& corpus, const Vocabulary& vocab);

struct TfidfMatrix {
    std::vector<std::string> doc_ids;
    std::vector<std::vector<std::pair<int, double>>> rows;
    int vocab_size = 0;
};

// tfidf[d,t] = (count / doc total) * ln(N / df(t)).
TfidfMatrix tfidf(const DocTermCounts& counts);

struct CTfidfTable {
    std::vector<int> topic_ids; // groups present, ascending
    // Per group, (term index, score), sorted by term index.
    std::vector<std::vector<std::pair<int, double>>> scores;
    std::vector<long long> topic_token_totals;
    std::vector<long long> global_term_counts; // f_t
    double avg_tokens_per_topic = 0.0;         // A
    int vocab_size = 0;

    // 0.0 when the term does not occur in the topic.
    double score(int topic_id, int term) const;
};

// W[t,c] = (count of t in topic c / tokens in topic c) * ln(1 + A / f_t),
// with A the average token total per group and f_t the corpus-wide count.
// topic_labels is aligned with counts rows; every present group needs at
// least one token.
CTfidfTable ctfidf(const DocTermCounts& counts, const std::vector<int>& topic_labels);

Eigen::MatrixXd to_dense(const TfidfMatrix& matrix);

struct TruncatedSvd {
    Eigen::MatrixXd U; // docs x d
    Eigen::VectorXd S; // d
    Eigen::MatrixXd V; // terms x d
};

// Thin SVD truncated to rank d with a fixed sign convention: the
// largest-magnitude entry of each right-singular vector is positive.
TruncatedSvd truncated_svd(const Eigen::MatrixXd& matrix, int d);

// Rows of U*S, L2-normalized; all-zero documents stay zero vectors.
Eigen::MatrixXd svd_embed(const TfidfMatrix& matrix, int d);

// CSV export (term, topic, score) for inspection.
std::string ctfidf_to_csv(const CTfidfTable& table, const Vocabulary& vocab);
// CSV export (term, doc_id, score).
std::string tfidf_to_csv(const TfidfMatrix& matrix, const Vocabulary& vocab);

} // namespace painmine
