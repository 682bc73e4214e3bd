#include "painmine/eval.hpp"

#include "painmine/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace painmine {

size_t CooccurrenceCounts::df(const std::string& word) const {
    auto it = postings.find(word);
    return it == postings.end() ? 0 : it->second.size();
}

size_t CooccurrenceCounts::joint(const std::string& a, const std::string& b) const {
    auto ia = postings.find(a);
    auto ib = postings.find(b);
    if (ia == postings.end() || ib == postings.end()) return 0;
    if (&ia->second == &ib->second) return ia->second.size();
    size_t count = 0;
    auto pa = ia->second.begin();
    auto pb = ib->second.begin();
    while (pa != ia->second.end() && pb != ib->second.end()) {
        if (*pa < *pb) {
            ++pa;
        } else if (*pb < *pa) {
            ++pb;
        } else {
            ++count;
            ++pa;
            ++pb;
        }
    }
    return count;
}

CooccurrenceCounts count_cooccurrence(const std::vector<std::vector<std::string>>& docs) {
    CooccurrenceCounts counts;
    counts.total_docs = docs.size();
    for (size_t d = 0; d < docs.size(); ++d) {
        std::set<std::string> unique(docs[d].begin(), docs[d].end());
        for (const auto& word : unique) counts.postings[word].push_back(static_cast<int>(d));
    }
    return counts;
}

namespace {

void require_seen(const std::string& word, const CooccurrenceCounts& counts) {
    if (counts.df(word) == 0)
        throw DataError("word '" + word + "' does not occur in the reference corpus");
}

} // namespace

double pmi(const std::string& a, const std::string& b, const CooccurrenceCounts& counts) {
    require_seen(a, counts);
    require_seen(b, counts);
    if (counts.total_docs == 0) throw DataError("empty reference corpus");
    const double total = static_cast<double>(counts.total_docs);
    const size_t joint = a == b ? counts.df(a) : counts.joint(a, b);
    if (joint == 0) return -std::numeric_limits<double>::infinity();
    const double p_joint = static_cast<double>(joint) / total;
    const double p_a = static_cast<double>(counts.df(a)) / total;
    const double p_b = static_cast<double>(counts.df(b)) / total;
    return std::log(p_joint / (p_a * p_b));
}

double npmi(const std::string& a, const std::string& b, const CooccurrenceCounts& counts) {
    require_seen(a, counts);
    require_seen(b, counts);
    if (counts.total_docs == 0) throw DataError("empty reference corpus");
    const size_t joint = a == b ? counts.df(a) : counts.joint(a, b);
    if (joint == 0) return -1.0;
    if (joint == counts.total_docs) return 1.0; // -ln P(a,b) = 0: perfect co-occurrence
    const double value = pmi(a, b, counts) /
                         (-std::log(static_cast<double>(joint) /
                                    static_cast<double>(counts.total_docs)));
    return std::clamp(value, -1.0, 1.0);
}

CoherenceReport topic_coherence(const std::vector<TopicSummary>& summaries,
                                const CooccurrenceCounts& counts, int top_r) {
    if (top_r < 2) throw ConfigError("topic coherence needs top_r >= 2");
    CoherenceReport report;
    double sum = 0.0;
    size_t scored = 0;
    for (const auto& summary : summaries) {
        if (summary.topic_id == kOutlierTopic) continue;
        std::vector<std::string> words;
        for (const auto& [word, score] : summary.words) {
            if (static_cast<int>(words.size()) >= top_r) break;
            if (counts.df(word) > 0) words.push_back(word);
        }
        if (words.size() < 2) {
            report.skipped.push_back(summary.topic_id);
            continue;
        }
        double pair_sum = 0.0;
        size_t pairs = 0;
        for (size_t i = 0; i < words.size(); ++i) {
            for (size_t j = i + 1; j < words.size(); ++j) {
                pair_sum += npmi(words[i], words[j], counts);
                ++pairs;
            }
        }
        double value = pair_sum / static_cast<double>(pairs);
        report.per_topic[summary.topic_id] = value;
        sum += value;
        ++scored;
    }
    report.mean = scored == 0 ? 0.0 : sum / static_cast<double>(scored);
    return report;
}

double outlier_ratio(const TopicAssignment& assignment) {
    if (assignment.labels.empty()) throw DataError("outlier ratio of an empty assignment");
    size_t outliers = 0;
    for (int label : assignment.labels)
        if (label == kOutlierTopic) ++outliers;
    return static_cast<double>(outliers) / static_cast<double>(assignment.labels.size());
}

ClassificationReport classification_report(const std::vector<int>& predictions,
                                           const std::vector<int>& golds) {
    if (predictions.empty() || predictions.size() != golds.size())
        throw DataError("classification report needs non-empty aligned labels");
    std::set<int> classes(golds.begin(), golds.end());
    classes.insert(predictions.begin(), predictions.end());

    ClassificationReport report;
    size_t correct = 0;
    for (size_t i = 0; i < golds.size(); ++i)
        if (predictions[i] == golds[i]) ++correct;
    report.accuracy = static_cast<double>(correct) / static_cast<double>(golds.size());

    double f1_sum = 0.0;
    for (int c : classes) {
        size_t tp = 0, fp = 0, fn = 0, support = 0;
        for (size_t i = 0; i < golds.size(); ++i) {
            if (golds[i] == c) {
                ++support;
                if (predictions[i] == c) {
                    ++tp;
                } else {
                    ++fn;
                }
            } else if (predictions[i] == c) {
                ++fp;
            }
        }
        double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        double recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        double f1 = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
        report.precision[c] = precision;
        report.recall[c] = recall;
        report.f1[c] = f1;
        report.support[c] = support;
        f1_sum += f1;
    }
    report.macro_f1 = f1_sum / static_cast<double>(classes.size());
    return report;
}

} // namespace painmine
