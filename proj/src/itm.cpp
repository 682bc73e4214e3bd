#include "painmine/itm.hpp"

#include "painmine/errors.hpp"
#include "painmine/log.hpp"
#include "painmine/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace painmine {

std::vector<double> class_recall(const std::vector<int>& predictions,
                                 const std::vector<int>& reference, int num_classes,
                                 std::vector<uint8_t>* zero_support) {
    if (predictions.size() != reference.size())
        throw DataError("recall needs aligned prediction/reference labels");
    if (num_classes < 1) throw ConfigError("recall needs at least one class");
    std::vector<size_t> support(num_classes, 0), hits(num_classes, 0);
    for (size_t i = 0; i < reference.size(); ++i) {
        const int ref = reference[i];
        if (ref < 0 || ref >= num_classes)
            throw DataError("reference label " + std::to_string(ref) + " out of range");
        ++support[ref];
        if (predictions[i] == ref) ++hits[ref];
    }
    std::vector<double> recalls(num_classes, 0.0);
    if (zero_support) zero_support->assign(num_classes, 0);
    for (int c = 0; c < num_classes; ++c) {
        if (support[c] == 0) {
            if (zero_support) (*zero_support)[c] = 1;
            continue;
        }
        recalls[c] = static_cast<double>(hits[c]) / static_cast<double>(support[c]);
    }
    return recalls;
}

ClassDifficulty thresholds(const std::vector<double>& recalls, double tau) {
    if (tau <= 0.0 || tau > 1.0) throw ConfigError("tau must be in (0, 1]");
    if (recalls.empty()) throw DataError("thresholds need at least one recall");
    double max_recall = 0.0;
    for (double r : recalls) {
        if (r < 0.0 || r > 1.0) throw DataError("recall outside [0, 1]");
        max_recall = std::max(max_recall, r);
    }
    if (max_recall == 0.0)
        throw DataError("all per-class recalls are zero; the assignment no longer "
                        "matches anything the classifier learned");
    ClassDifficulty out;
    out.recall = recalls;
    out.relative.reserve(recalls.size());
    out.threshold.reserve(recalls.size());
    out.zero_support.assign(recalls.size(), 0);
    for (double r : recalls) {
        const double rel = r / max_recall;
        out.relative.push_back(rel);
        out.threshold.push_back(rel * tau);
    }
    return out;
}

std::vector<int> modify_labels(const std::vector<std::vector<double>>& probas,
                               const std::vector<int>& labels_prev,
                               const ClassDifficulty& difficulty,
                               std::vector<LabelChange>* changes) {
    if (probas.size() != labels_prev.size())
        throw DataError("label update needs one probability row per doc");
    std::vector<int> next = labels_prev;
    if (changes) changes->clear();
    for (size_t i = 0; i < probas.size(); ++i) {
        const auto& row = probas[i];
        if (row.size() != difficulty.threshold.size())
            throw DataError("probability row width does not match class count");
        size_t best = 0;
        for (size_t c = 1; c < row.size(); ++c)
            if (row[c] > row[best]) best = c;
        const int c_star = static_cast<int>(best);
        if (c_star != labels_prev[i] && row[best] > difficulty.threshold[best]) {
            next[i] = c_star;
            if (changes)
                changes->push_back({i, labels_prev[i], c_star, row[best],
                                    difficulty.threshold[best]});
        }
    }
    return next;
}

namespace {

double assignment_npmi(const std::vector<int>& labels, const TopicAssignment& base,
                       const DocTermCounts& counts, const CooccurrenceCounts& cooccurrence,
                       const Vocabulary& vocab, int top_r) {
    bool any_topic = false;
    for (int label : labels) {
        if (label != kOutlierTopic) {
            any_topic = true;
            break;
        }
    }
    if (!any_topic) return -1.0; // nothing to score: worst coherence
    CTfidfTable table = ctfidf(counts, labels);
    TopicAssignment assignment;
    assignment.doc_ids = base.doc_ids;
    assignment.labels = labels;
    MergeConfig config;
    config.top_r = top_r;
    config.noun_filter = false; // stop metric scores raw c-TF-IDF words
    config.s = std::numeric_limits<double>::infinity(); // keywords unused here
    TaggerConfig tagger; // unused with noun_filter off
    auto summaries = representative_words(assignment, table, vocab, config, tagger);
    return topic_coherence(summaries, cooccurrence, top_r).mean;
}

double ratio_of(const std::vector<int>& labels) {
    size_t outliers = 0;
    for (int label : labels)
        if (label == kOutlierTopic) ++outliers;
    return labels.empty() ? 0.0
                          : static_cast<double>(outliers) / static_cast<double>(labels.size());
}

} // namespace

ItmState run_itm(const std::vector<std::vector<int>>& docs, const DocTermCounts& counts,
                 const CooccurrenceCounts& cooccurrence, const Vocabulary& vocab,
                 const TopicAssignment& initial, const ItmConfig& config) {
    if (config.max_steps < 0) throw ConfigError("max_steps must be >= 0");
    if (config.patience < 1) throw ConfigError("patience must be >= 1");
    if (config.epochs_per_step < 1) throw ConfigError("epochs_per_step must be >= 1");
    if (docs.size() != initial.labels.size())
        throw DataError("ITM docs and initial assignment are misaligned");
    const int m = initial.num_topics();
    if (m < 1) throw DataError("ITM needs at least one non-outlier topic");
    const int num_classes = m + 1; // OUTLIER participates as class 0

    ItmState state;
    state.labels = initial;
    state.classifier = init_classifier(vocab.size(), num_classes, config.train);
    state.classifier.vocab_hash = vocab.hash();
    Trainer trainer(state.classifier, config.train);

    state.initial_npmi =
        assignment_npmi(initial.labels, initial, counts, cooccurrence, vocab,
                        config.coherence_top_r);
    state.initial_outlier = ratio_of(initial.labels);

    double best_npmi = state.initial_npmi;
    double best_outlier = state.initial_outlier;
    double best_changes = std::numeric_limits<double>::infinity();
    int bad_streak = 0;
    state.stop_reason = "max_steps";

    for (int step = 1; step <= config.max_steps; ++step) {
        if (config.cold_start) {
            TextClassifier fresh = init_classifier(vocab.size(), num_classes, config.train);
            fresh.vocab_hash = vocab.hash();
            trainer = Trainer(std::move(fresh), config.train);
        }
        trainer.run(docs, state.labels.labels, config.epochs_per_step);
        const TextClassifier& model = trainer.model();

        std::vector<std::vector<double>> probas(docs.size());
        std::vector<int> predictions(docs.size());
        for (size_t i = 0; i < docs.size(); ++i) {
            probas[i] = predict_proba(model, docs[i]);
            size_t best = 0;
            for (size_t c = 1; c < probas[i].size(); ++c)
                if (probas[i][c] > probas[i][best]) best = c;
            predictions[i] = static_cast<int>(best);
        }

        ItmStepRecord record;
        record.step = step;
        std::vector<uint8_t> zero_support;
        record.recalls = class_recall(predictions, state.labels.labels, num_classes,
                                      &zero_support);
        ClassDifficulty difficulty = thresholds(record.recalls, config.tau);
        difficulty.zero_support = zero_support;
        record.relative = difficulty.relative;
        record.thresholds = difficulty.threshold;

        std::vector<int> next =
            modify_labels(probas, state.labels.labels, difficulty, &record.changes);
        record.label_change_count = record.changes.size();
        record.argmax_class.resize(docs.size());
        record.argmax_proba.resize(docs.size());
        for (size_t i = 0; i < docs.size(); ++i) {
            size_t best = 0;
            for (size_t c = 1; c < probas[i].size(); ++c)
                if (probas[i][c] > probas[i][best]) best = c;
            record.argmax_class[i] = static_cast<int>(best);
            record.argmax_proba[i] = probas[i][best];
        }

        record.npmi = assignment_npmi(next, initial, counts, cooccurrence, vocab,
                                      config.coherence_top_r);
        record.outlier = ratio_of(next);

        state.labels.labels = next;
        state.classifier = model;
        state.steps_run = step;
        state.history.push_back(std::move(record));
        const ItmStepRecord& rec = state.history.back();
        log_debug("itm step " + std::to_string(step) + ": changes=" +
                        std::to_string(rec.label_change_count) + " npmi=" +
                        format_double(rec.npmi) + " outlier=" + format_double(rec.outlier));

        if (rec.label_change_count == 0) {
            state.stop_reason = "zero_changes";
            break;
        }

        int failed = 0;
        if (!(rec.npmi > best_npmi)) ++failed;
        if (!(rec.outlier < best_outlier)) ++failed;
        if (!(static_cast<double>(rec.label_change_count) < best_changes)) ++failed;
        best_npmi = std::max(best_npmi, rec.npmi);
        best_outlier = std::min(best_outlier, rec.outlier);
        best_changes = std::min(best_changes, static_cast<double>(rec.label_change_count));
        if (failed >= 2) {
            if (++bad_streak >= config.patience) {
                state.stop_reason = "stop_metrics";
                break;
            }
        } else {
            bad_streak = 0;
        }
    }
    if (config.max_steps == 0) state.stop_reason = "max_steps";
    return state;
}

std::string history_to_jsonl(const ItmState& state) {
    std::string out;
    for (const auto& record : state.history) {
        nlohmann::ordered_json changes = nlohmann::ordered_json::array();
        for (const auto& change : record.changes) {
            changes.push_back({{"doc_id", state.labels.doc_ids[change.doc_index]},
                               {"from", change.from},
                               {"to", change.to},
                               {"proba", format_double(change.proba)},
                               {"threshold", format_double(change.threshold)}});
        }
        auto fmt = [](const std::vector<double>& values) {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (double v : values) arr.push_back(format_double(v));
            return arr;
        };
        nlohmann::ordered_json record_json{{"step", record.step},
                                           {"recalls", fmt(record.recalls)},
                                           {"relative_recalls", fmt(record.relative)},
                                           {"thresholds", fmt(record.thresholds)},
                                           {"label_changes", record.label_change_count},
                                           {"npmi", format_double(record.npmi)},
                                           {"outlier_ratio", format_double(record.outlier)},
                                           {"changes", std::move(changes)}};
        out += record_json.dump();
        out += '\n';
    }
    return out;
}

} // namespace painmine
