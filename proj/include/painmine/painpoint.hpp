#pragma once

#include "painmine/chunker.hpp"
#include "painmine/classifier.hpp"
#include "painmine/corpus.hpp"
#include "painmine/features.hpp"
#include "painmine/topics.hpp"

#include <set>
#include <string>
#include <vector>

namespace painmine {

struct ExtractConfig {
    int g = 3;            // attribution tokens kept per review
    int n_sentiment = 30; // final list size, sentiment scope
    int n_per_topic = 10; // final list size per topic
    std::set<std::string> stopwords;
    AttributionMethod method = AttributionMethod::GradInput;
    int ig_steps = 64;
};

struct Candidate {
    std::string doc_id;
    size_t token_index = 0; // index into the doc's full token list
    std::string word;
    double score = 0.0;
    int source_topic = -1; // -1 = sentiment scope
};

struct ExpandedWord {
    std::string word;
    std::string doc_id;
    bool unexpanded = false; // no NP found; the candidate word itself
};

struct PainPointEntry {
    std::string word;
    size_t frequency = 0;
    std::vector<std::string> examples; // up to 5 doc ids
};

struct PainPointSet {
    int topic_id = -1; // -1 = sentiment scope
    std::vector<PainPointEntry> entries;

    bool is_sentiment() const { return topic_id < 0; }
};

// Indices of the g largest scores, ties to the smaller index; all indices
// when the doc is shorter than g.
std::vector<size_t> topg_tokens(const AttributionVector& attr, int g);

// Candidate inside an NP -> the NP's noun tokens; inside a VP -> the
// nearest NP's noun tokens (left first, then right); otherwise the word
// itself, flagged unexpanded.
std::vector<ExpandedWord> expand_candidate(const Candidate& candidate,
                                           const DocAnnotation& annotation);

// Frequency ranking over stopword-filtered expanded words: top-N by
// (frequency desc, word asc), keeping up to 5 example doc ids per word.
PainPointSet rank_painpoints(const std::vector<ExpandedWord>& expanded,
                             const std::set<std::string>& stopwords, int n, int topic_id);

// Reviews the model predicts negative, attributed against the predicted
// class; empty (with a warning) when nothing is predicted negative.
PainPointSet extract_sentiment_painpoints(const std::vector<CleanReview>& corpus,
                                          const Vocabulary& vocab, const TextClassifier& model,
                                          const ExtractConfig& config,
                                          const TaggerConfig& tagger,
                                          const AnnotationStore* annotations);

// One set per non-outlier topic with members, each member attributed
// against its assigned topic class.
std::vector<PainPointSet> extract_topic_painpoints(const std::vector<CleanReview>& corpus,
                                                   const Vocabulary& vocab,
                                                   const TextClassifier& model,
                                                   const TopicAssignment& assignment,
                                                   const ExtractConfig& config,
                                                   const TaggerConfig& tagger,
                                                   const AnnotationStore* annotations);

std::string painpoints_to_json(const std::vector<PainPointSet>& sets);
std::vector<PainPointSet> painpoints_from_json(const std::string& text);
std::string painpoints_to_csv(const std::vector<PainPointSet>& sets);

} // namespace painmine
