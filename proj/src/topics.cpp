#include "painmine/topics.hpp"

#include "painmine/errors.hpp"
#include "painmine/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace painmine {

int TopicAssignment::num_topics() const {
    int m = 0;
    for (int label : labels) m = std::max(m, label);
    return m;
}

std::map<int, size_t> TopicAssignment::sizes() const {
    std::map<int, size_t> out;
    for (int label : labels) ++out[label];
    return out;
}

namespace {

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out = m;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        double norm = out.row(i).norm();
        if (norm > 0.0) out.row(i) /= norm;
    }
    return out;
}

} // namespace

KMeansResult cosine_kmeans(const Eigen::MatrixXd& embeddings, int k, uint64_t seed,
                           int max_iters) {
    const Eigen::Index n = embeddings.rows();
    if (k < 1) throw ConfigError("k-means requires k >= 1");
    if (static_cast<Eigen::Index>(k) > n) {
        throw ConfigError("k-means k=" + std::to_string(k) + " exceeds doc count " +
                          std::to_string(n));
    }
    Eigen::MatrixXd points = normalize_rows(embeddings);

    // Farthest-point seeding: random first center, then repeatedly the
    // point with largest distance to its nearest chosen center.
    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> centers;
    std::vector<char> chosen(n, 0);
    Eigen::Index first = static_cast<Eigen::Index>(rng() % static_cast<uint64_t>(n));
    centers.push_back(first);
    chosen[first] = 1;
    Eigen::VectorXd min_dist(n);
    for (Eigen::Index i = 0; i < n; ++i)
        min_dist(i) = 1.0 - points.row(i).dot(points.row(first));
    while (static_cast<int>(centers.size()) < k) {
        Eigen::Index best = -1;
        double best_dist = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (chosen[i]) continue;
            if (min_dist(i) > best_dist) {
                best_dist = min_dist(i);
                best = i;
            }
        }
        centers.push_back(best);
        chosen[best] = 1;
        for (Eigen::Index i = 0; i < n; ++i) {
            double d = 1.0 - points.row(i).dot(points.row(best));
            if (d < min_dist(i)) min_dist(i) = d;
        }
    }

    Eigen::MatrixXd centroids(k, points.cols());
    for (int c = 0; c < k; ++c) centroids.row(c) = points.row(centers[c]);

    std::vector<int> cluster(n, 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        Eigen::MatrixXd sims = points * centroids.transpose(); // n x k
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_sim = sims(i, 0);
            for (int c = 1; c < k; ++c) {
                if (sims(i, c) > best_sim) {
                    best_sim = sims(i, c);
                    best = c;
                }
            }
            if (best != cluster[i]) {
                cluster[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        std::vector<size_t> counts(k, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(cluster[i]) += points.row(i);
            ++counts[cluster[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) continue; // empty cluster keeps its centroid
            double norm = sums.row(c).norm();
            if (norm > 0.0) centroids.row(c) = sums.row(c) / norm;
        }
        if (!changed) break;
    }

    KMeansResult result;
    result.cluster = std::move(cluster);
    result.centroids = std::move(centroids);
    result.similarity.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        result.similarity[i] = points.row(i).dot(result.centroids.row(result.cluster[i]));
    return result;
}

double mean_silhouette(const Eigen::MatrixXd& embeddings, const std::vector<int>& cluster) {
    const Eigen::Index n = embeddings.rows();
    if (n == 0) throw DataError("silhouette of an empty set");
    Eigen::MatrixXd points = normalize_rows(embeddings);
    Eigen::MatrixXd sims = points * points.transpose();
    int k = 0;
    for (int c : cluster) k = std::max(k, c + 1);
    std::vector<size_t> counts(k, 0);
    for (int c : cluster) ++counts[c];

    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> dist_sum(k, 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            dist_sum[cluster[j]] += 1.0 - sims(i, j);
        }
        int own = cluster[i];
        if (counts[own] <= 1) continue; // silhouette 0 for singletons
        double a = dist_sum[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || counts[c] == 0) continue;
            b = std::min(b, dist_sum[c] / static_cast<double>(counts[c]));
        }
        if (!std::isfinite(b)) continue; // single non-empty cluster
        double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

int choose_k(const Eigen::MatrixXd& embeddings, const std::vector<int>& candidates,
             uint64_t seed) {
    const Eigen::Index n = embeddings.rows();
    int best_k = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int k : candidates) {
        if (k < 2 || static_cast<Eigen::Index>(k) >= n) continue;
        KMeansResult km = cosine_kmeans(embeddings, k, seed);
        double score = mean_silhouette(embeddings, km.cluster);
        if (score > best_score) {
            best_score = score;
            best_k = k;
        }
    }
    if (best_k < 0) throw ConfigError("no feasible k among the candidates");
    return best_k;
}

namespace {

// Map surviving non-outlier ids (ascending) onto 1..M.
std::vector<int> renumber_dense(const std::vector<int>& labels) {
    std::set<int> present;
    for (int label : labels)
        if (label != kOutlierTopic) present.insert(label);
    std::map<int, int> remap;
    int next = 1;
    for (int id : present) remap[id] = next++;
    std::vector<int> out(labels.size(), kOutlierTopic);
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != kOutlierTopic) out[i] = remap[labels[i]];
    return out;
}

} // namespace

TopicAssignment initial_topics(const Eigen::MatrixXd& embeddings,
                               const std::vector<std::string>& doc_ids, int k,
                               double outlier_quantile, uint64_t seed) {
    const Eigen::Index n = embeddings.rows();
    if (static_cast<size_t>(n) != doc_ids.size())
        throw DataError("embeddings and doc ids are misaligned");
    if (k < 2) throw ConfigError("initial topics require k >= 2");
    if (outlier_quantile < 0.0 || outlier_quantile >= 1.0)
        throw ConfigError("outlier quantile must be in [0, 1)");
    KMeansResult km = cosine_kmeans(embeddings, k, seed);

    size_t n_out = static_cast<size_t>(outlier_quantile * static_cast<double>(n) + 1e-9);
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return km.similarity[a] < km.similarity[b];
    });

    std::vector<int> labels(n);
    for (Eigen::Index i = 0; i < n; ++i) labels[i] = km.cluster[i] + 1;
    for (size_t r = 0; r < n_out && r < order.size(); ++r) labels[order[r]] = kOutlierTopic;

    TopicAssignment assignment;
    assignment.doc_ids = doc_ids;
    assignment.labels = renumber_dense(labels);
    return assignment;
}

std::vector<TopicSummary> representative_words(const TopicAssignment& assignment,
                                               const CTfidfTable& table,
                                               const Vocabulary& vocab,
                                               const MergeConfig& config,
                                               const TaggerConfig& tagger) {
    auto topic_sizes = assignment.sizes();
    std::vector<TopicSummary> summaries;
    for (size_t t = 0; t < table.topic_ids.size(); ++t) {
        int topic = table.topic_ids[t];
        if (topic == kOutlierTopic) continue;
        std::vector<std::pair<std::string, double>> scored;
        for (const auto& [term, score] : table.scores[t]) {
            const std::string& word = vocab.index_to_token[term];
            if (config.noun_filter) {
                if (pos_tag({word}, tagger)[0].tag != PosTag::Noun) continue;
            }
            scored.emplace_back(word, score);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (static_cast<int>(scored.size()) > config.top_r)
            scored.resize(static_cast<size_t>(config.top_r));
        TopicSummary summary;
        summary.topic_id = topic;
        auto size_it = topic_sizes.find(topic);
        summary.size = size_it == topic_sizes.end() ? 0 : size_it->second;
        summary.words = std::move(scored);
        for (const auto& [word, score] : summary.words)
            if (score >= config.s) summary.keywords.push_back(word);
        summaries.push_back(std::move(summary));
    }
    return summaries;
}

MergeResult merge_topics(const std::vector<TopicSummary>& summaries,
                         const TopicAssignment& assignment) {
    std::set<int> covered;
    for (const auto& s : summaries) covered.insert(s.topic_id);
    for (int label : assignment.labels) {
        if (label != kOutlierTopic && covered.count(label) == 0)
            throw DataError("no summary for topic " + std::to_string(label));
    }

    // Union-find over topic ids; topics sharing any keyword are joined.
    std::map<int, int> parent;
    for (int id : covered) parent[id] = id;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b); // keep the lowest id as the root
        parent[b] = a;
    };
    std::map<std::string, std::vector<int>> keyword_topics;
    for (const auto& s : summaries)
        for (const auto& kw : s.keywords) keyword_topics[kw].push_back(s.topic_id);
    for (const auto& [kw, topics] : keyword_topics)
        for (size_t i = 1; i < topics.size(); ++i) unite(topics[0], topics[i]);

    std::map<int, std::vector<int>> groups; // root -> constituents
    for (int id : covered) groups[find(id)].push_back(id);

    std::map<int, int> root_to_new;
    int next = 1;
    for (const auto& [root, members] : groups) root_to_new[root] = next++;

    MergeResult result;
    result.assignment.doc_ids = assignment.doc_ids;
    result.assignment.labels.reserve(assignment.labels.size());
    for (int label : assignment.labels) {
        result.assignment.labels.push_back(
            label == kOutlierTopic ? kOutlierTopic : root_to_new[find(label)]);
    }
    for (const auto& s : summaries) result.old_to_new[s.topic_id] = root_to_new[find(s.topic_id)];

    auto sizes = result.assignment.sizes();
    for (const auto& [root, members] : groups) {
        TopicSummary merged;
        merged.topic_id = root_to_new.at(root);
        auto size_it = sizes.find(merged.topic_id);
        merged.size = size_it == sizes.end() ? 0 : size_it->second;
        std::map<std::string, double> best_score;
        std::set<std::string> keywords;
        for (const auto& s : summaries) {
            if (find(s.topic_id) != root) continue;
            for (const auto& [word, score] : s.words) {
                auto it = best_score.find(word);
                if (it == best_score.end() || score > it->second) best_score[word] = score;
            }
            keywords.insert(s.keywords.begin(), s.keywords.end());
        }
        merged.words.assign(best_score.begin(), best_score.end());
        std::sort(merged.words.begin(), merged.words.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        merged.keywords.assign(keywords.begin(), keywords.end());
        result.summaries.push_back(std::move(merged));
        result.merged_groups.push_back(members);
    }
    return result;
}

TopicAssignment adjust_minor_topics(const TopicAssignment& assignment, int min_topic_size) {
    if (min_topic_size < 1) throw ConfigError("min_topic_size must be >= 1");
    auto sizes = assignment.sizes();
    std::vector<int> labels = assignment.labels;
    for (auto& label : labels) {
        if (label == kOutlierTopic) continue;
        if (sizes[label] < static_cast<size_t>(min_topic_size)) label = kOutlierTopic;
    }
    TopicAssignment out;
    out.doc_ids = assignment.doc_ids;
    out.labels = renumber_dense(labels);
    return out;
}

std::string assignment_to_csv(const TopicAssignment& assignment) {
    std::string out = "doc_id,topic_id\n";
    for (size_t i = 0; i < assignment.doc_ids.size(); ++i) {
        out += assignment.doc_ids[i];
        out += ',';
        out += std::to_string(assignment.labels[i]);
        out += '\n';
    }
    return out;
}

TopicAssignment assignment_from_csv(const std::string& text) {
    TopicAssignment out;
    const auto lines = split_lines(text);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        if (i == 0 && lines[i] == "doc_id,topic_id") continue;
        size_t comma = lines[i].rfind(',');
        if (comma == std::string::npos)
            throw DataError("assignment CSV line " + std::to_string(i + 1) + ": missing comma");
        out.doc_ids.push_back(lines[i].substr(0, comma));
        try {
            out.labels.push_back(std::stoi(lines[i].substr(comma + 1)));
        } catch (const std::exception&) {
            throw DataError("assignment CSV line " + std::to_string(i + 1) + ": bad topic id");
        }
    }
    return out;
}

std::string summaries_to_json(const std::vector<TopicSummary>& summaries) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& s : summaries) {
        nlohmann::ordered_json words = nlohmann::ordered_json::array();
        for (const auto& [word, score] : s.words)
            words.push_back({{"word", word}, {"score", format_double(score)}});
        arr.push_back({{"topic_id", s.topic_id},
                       {"size", s.size},
                       {"words", std::move(words)},
                       {"keywords", s.keywords}});
    }
    return arr.dump(2) + "\n";
}

std::vector<TopicSummary> summaries_from_json(const std::string& text) {
    std::vector<TopicSummary> out;
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad topic summary JSON: ") + e.what());
    }
    if (!arr.is_array()) throw DataError("topic summary JSON must be an array");
    for (const auto& item : arr) {
        TopicSummary s;
        s.topic_id = item.at("topic_id").get<int>();
        s.size = item.at("size").get<size_t>();
        for (const auto& w : item.at("words")) {
            s.words.emplace_back(w.at("word").get<std::string>(),
                                 std::strtod(w.at("score").get<std::string>().c_str(), nullptr));
        }
        for (const auto& kw : item.at("keywords")) s.keywords.push_back(kw.get<std::string>());
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace painmine
