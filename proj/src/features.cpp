#include "painmine/features.hpp"

#include "painmine/errors.hpp"
#include "painmine/util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace painmine {

namespace {

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

} // namespace

std::vector<std::string> tokenize(const std::string& normalized_text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : normalized_text) {
        if (is_word_byte(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

int Vocabulary::lookup(const std::string& token) const {
    auto it = token_to_index.find(token);
    return it == token_to_index.end() ? -1 : it->second;
}

std::string Vocabulary::hash() const {
    uint64_t h = fnv1a64("vocab");
    for (const auto& token : index_to_token) {
        h = fnv1a64(token, h);
        h = fnv1a64("\n", h);
    }
    return to_hex(h);
}

Vocabulary build_vocab(const std::vector<CleanReview>& corpus) {
    Vocabulary vocab;
    for (const auto& review : corpus) {
        if (!review.kept) continue;
        for (const auto& token : review.tokens) {
            if (vocab.token_to_index.emplace(token, vocab.size()).second) {
                vocab.index_to_token.push_back(token);
            }
        }
    }
    if (vocab.index_to_token.empty()) {
        throw DataError("build_vocab: corpus has no kept reviews with tokens");
    }
    return vocab;
}

std::vector<int> map_tokens(const Vocabulary& vocab, const std::vector<std::string>& tokens) {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& token : tokens) {
        int id = vocab.lookup(token);
        if (id >= 0) ids.push_back(id);
    }
    return ids;
}

DocTermCounts count(const std::vector<CleanReview>& corpus, const Vocabulary& vocab) {
    DocTermCounts counts;
    counts.vocab_size = vocab.size();
    for (const auto& review : corpus) {
        if (!review.kept) continue;
        std::map<int, int> row;
        for (const auto& token : review.tokens) {
            int id = vocab.lookup(token);
            if (id >= 0) row[id] += 1;
        }
        counts.doc_ids.push_back(review.id);
        std::vector<std::pair<int, int>> sorted_row(row.begin(), row.end());
        int total = 0;
        for (const auto& [_, c] : sorted_row) total += c;
        counts.rows.push_back(std::move(sorted_row));
        counts.doc_totals.push_back(total);
    }
    if (counts.rows.empty()) {
        throw DataError("count: corpus has no kept reviews");
    }
    return counts;
}

TfidfMatrix tfidf(const DocTermCounts& counts) {
    if (counts.rows.empty()) {
        throw DataError("tfidf: empty counts");
    }
    const size_t n_docs = counts.rows.size();
    std::vector<int> df(counts.vocab_size, 0);
    for (const auto& row : counts.rows) {
        for (const auto& [term, _] : row) df[term] += 1;
    }
    TfidfMatrix matrix;
    matrix.doc_ids = counts.doc_ids;
    matrix.vocab_size = counts.vocab_size;
    matrix.rows.resize(n_docs);
    for (size_t d = 0; d < n_docs; ++d) {
        const double total = counts.doc_totals[d];
        if (total == 0) continue;
        auto& out = matrix.rows[d];
        out.reserve(counts.rows[d].size());
        for (const auto& [term, c] : counts.rows[d]) {
            const double tf = c / total;
            const double idf = std::log(static_cast<double>(n_docs) / df[term]);
            out.emplace_back(term, tf * idf);
        }
    }
    return matrix;
}

double CTfidfTable::score(int topic_id, int term) const {
    auto it = std::lower_bound(topic_ids.begin(), topic_ids.end(), topic_id);
    if (it == topic_ids.end() || *it != topic_id) return 0.0;
    const auto& row = scores[static_cast<size_t>(it - topic_ids.begin())];
    auto entry = std::lower_bound(row.begin(), row.end(), std::make_pair(term, 0.0),
                                  [](const auto& a, const auto& b) { return a.first < b.first; });
    if (entry == row.end() || entry->first != term) return 0.0;
    return entry->second;
}

CTfidfTable ctfidf(const DocTermCounts& counts, const std::vector<int>& topic_labels) {
    if (topic_labels.size() != counts.rows.size()) {
        throw DataError("ctfidf: topic labels are not aligned with counts");
    }
    // Aggregate counts per group.
    std::map<int, std::map<int, long long>> group_counts;
    std::map<int, long long> group_totals;
    for (size_t d = 0; d < counts.rows.size(); ++d) {
        auto& gc = group_counts[topic_labels[d]];
        auto& gt = group_totals[topic_labels[d]];
        for (const auto& [term, c] : counts.rows[d]) {
            gc[term] += c;
            gt += c;
        }
    }
    CTfidfTable table;
    table.vocab_size = counts.vocab_size;
    table.global_term_counts.assign(counts.vocab_size, 0);
    long long corpus_total = 0;
    for (const auto& row : counts.rows) {
        for (const auto& [term, c] : row) {
            table.global_term_counts[term] += c;
            corpus_total += c;
        }
    }
    table.avg_tokens_per_topic = static_cast<double>(corpus_total) / group_counts.size();
    for (const auto& [topic, terms] : group_counts) {
        const long long total = group_totals[topic];
        if (total == 0) {
            throw DataError("ctfidf: topic " + std::to_string(topic) + " has zero tokens");
        }
        std::vector<std::pair<int, double>> row;
        row.reserve(terms.size());
        for (const auto& [term, c] : terms) {
            const double tf = static_cast<double>(c) / total;
            const double weight =
                std::log(1.0 + table.avg_tokens_per_topic / table.global_term_counts[term]);
            row.emplace_back(term, tf * weight);
        }
        table.topic_ids.push_back(topic);
        table.scores.push_back(std::move(row));
        table.topic_token_totals.push_back(total);
    }
    return table;
}

Eigen::MatrixXd to_dense(const TfidfMatrix& matrix) {
    Eigen::MatrixXd dense =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(matrix.rows.size()), matrix.vocab_size);
    for (size_t d = 0; d < matrix.rows.size(); ++d) {
        for (const auto& [term, value] : matrix.rows[d]) {
            dense(static_cast<Eigen::Index>(d), term) = value;
        }
    }
    return dense;
}

TruncatedSvd truncated_svd(const Eigen::MatrixXd& matrix, int d) {
    if (d < 1 || d > std::min(matrix.rows(), matrix.cols())) {
        throw ConfigError("truncated_svd: rank " + std::to_string(d) + " out of range for " +
                          std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) +
                          " matrix");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd result;
    result.U = svd.matrixU().leftCols(d);
    result.S = svd.singularValues().head(d);
    result.V = svd.matrixV().leftCols(d);
    for (int k = 0; k < d; ++k) {
        Eigen::Index max_row = 0;
        result.V.col(k).cwiseAbs().maxCoeff(&max_row);
        if (result.V(max_row, k) < 0.0) {
            result.V.col(k) *= -1.0;
            result.U.col(k) *= -1.0;
        }
    }
    return result;
}

Eigen::MatrixXd svd_embed(const TfidfMatrix& matrix, int d) {
    const auto svd = truncated_svd(to_dense(matrix), d);
    Eigen::MatrixXd embeddings = svd.U * svd.S.asDiagonal();
    for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
        const double norm = embeddings.row(i).norm();
        if (norm > 0.0) {
            embeddings.row(i) /= norm;
        } else {
            embeddings.row(i).setZero();
        }
    }
    return embeddings;
}

std::string ctfidf_to_csv(const CTfidfTable& table, const Vocabulary& vocab) {
    std::ostringstream out;
    out << "term,topic,score\n";
    for (size_t g = 0; g < table.topic_ids.size(); ++g) {
        for (const auto& [term, score] : table.scores[g]) {
            out << vocab.index_to_token[term] << ',' << table.topic_ids[g] << ','
                << format_double(score) << '\n';
        }
    }
    return out.str();
}

std::string tfidf_to_csv(const TfidfMatrix& matrix, const Vocabulary& vocab) {
    std::ostringstream out;
    out << "term,doc_id,score\n";
    for (size_t d = 0; d < matrix.rows.size(); ++d) {
        for (const auto& [term, score] : matrix.rows[d]) {
            out << vocab.index_to_token[term] << ',' << matrix.doc_ids[d] << ','
                << format_double(score) << '\n';
        }
    }
    return out.str();
}

} // namespace painmine
