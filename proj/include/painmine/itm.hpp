#pragma once

#include "painmine/classifier.hpp"
#include "painmine/eval.hpp"
#include "painmine/features.hpp"
#include "painmine/topics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace painmine {

struct ItmConfig {
    double tau = 0.6; // flexible-threshold scale, searched over {0.4, 0.5, 0.6, 0.7}
    int max_steps = 100;
    int patience = 2;
    int epochs_per_step = 1;
    bool cold_start = false; // re-initialize the classifier every step
    int coherence_top_r = 10;
    TrainConfig train;
};

struct ClassDifficulty {
    std::vector<double> recall;    // indexed by class id, OUTLIER = 0
    std::vector<double> relative;  // recall / max recall
    std::vector<double> threshold; // relative * tau
    std::vector<uint8_t> zero_support;
};

// recall(c) = |{d : ref(d)=c and pred(d)=c}| / |{d : ref(d)=c}|; classes
// without support get recall 0 and a zero_support flag.
std::vector<double> class_recall(const std::vector<int>& predictions,
                                 const std::vector<int>& reference, int num_classes,
                                 std::vector<uint8_t>* zero_support = nullptr);

// Relative recall and per-class thresholds; errors when every recall is
// zero (a degenerate step that signals a broken initialization).
ClassDifficulty thresholds(const std::vector<double>& recalls, double tau);

struct LabelChange {
    size_t doc_index = 0;
    int from = 0;
    int to = 0;
    double proba = 0.0;     // predicted probability of the new class
    double threshold = 0.0; // threshold it had to exceed
};

// A doc moves to its argmax class c* iff c* differs from the previous
// label and proba(c*) strictly exceeds threshold(c*).
std::vector<int> modify_labels(const std::vector<std::vector<double>>& probas,
                               const std::vector<int>& labels_prev,
                               const ClassDifficulty& difficulty,
                               std::vector<LabelChange>* changes = nullptr);

struct ItmStepRecord {
    int step = 0;
    std::vector<double> recalls;
    std::vector<double> relative;
    std::vector<double> thresholds;
    size_t label_change_count = 0;
    double npmi = 0.0;
    double outlier = 0.0;
    std::vector<LabelChange> changes;
    // Full per-doc decisions, kept in memory so every non-change is as
    // replayable as every change. Not exported to the history file.
    std::vector<int> argmax_class;
    std::vector<double> argmax_proba;
};

struct ItmState {
    TopicAssignment labels;
    TextClassifier classifier;
    std::vector<ItmStepRecord> history;
    int steps_run = 0;
    std::string stop_reason;
    double initial_npmi = 0.0;
    double initial_outlier = 0.0;
};

// One loop step = train on labels_{t-1}, predict, recall vs labels_{t-1},
// thresholds, relabel. Stops on zero changes, on max_steps, or when at
// least 2 of the 3 stop metrics (npmi up, outlier ratio down, label
// changes down) fail to improve on their best for `patience` consecutive
// steps.
ItmState run_itm(const std::vector<std::vector<int>>& docs, const DocTermCounts& counts,
                 const CooccurrenceCounts& cooccurrence, const Vocabulary& vocab,
                 const TopicAssignment& initial, const ItmConfig& config);

std::string history_to_jsonl(const ItmState& state);

} // namespace painmine
