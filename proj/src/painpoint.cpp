#include "painmine/painpoint.hpp"

#include "painmine/errors.hpp"
#include "painmine/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>

namespace painmine {

std::vector<size_t> topg_tokens(const AttributionVector& attr, int g) {
    if (g < 1) throw ConfigError("top-g needs g >= 1");
    const size_t n = attr.scores.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return attr.scores[a] > attr.scores[b]; // stable keeps ties at lower index
    });
    if (n > static_cast<size_t>(g)) order.resize(static_cast<size_t>(g));
    std::sort(order.begin(), order.end());
    return order;
}

namespace {

std::vector<std::string> noun_tokens(const DocAnnotation& annotation, const PhraseChunk& np) {
    std::vector<std::string> nouns;
    for (size_t i = np.start; i < np.end; ++i)
        if (annotation.tags[i].tag == PosTag::Noun) nouns.push_back(annotation.tags[i].token);
    return nouns;
}

} // namespace

std::vector<ExpandedWord> expand_candidate(const Candidate& candidate,
                                           const DocAnnotation& annotation) {
    std::vector<ExpandedWord> out;
    const int c = chunk_at(annotation.chunks, candidate.token_index);
    const PhraseChunk* np = nullptr;
    if (c >= 0) {
        const PhraseChunk& own = annotation.chunks[static_cast<size_t>(c)];
        if (own.kind == ChunkKind::NP) {
            np = &own;
        } else {
            const int rel = related_np(annotation.chunks, static_cast<size_t>(c));
            if (rel >= 0) np = &annotation.chunks[static_cast<size_t>(rel)];
        }
    }
    if (np != nullptr) {
        for (auto& word : noun_tokens(annotation, *np))
            out.push_back({std::move(word), candidate.doc_id, false});
    }
    if (out.empty()) out.push_back({candidate.word, candidate.doc_id, true});
    return out;
}

PainPointSet rank_painpoints(const std::vector<ExpandedWord>& expanded,
                             const std::set<std::string>& stopwords, int n, int topic_id) {
    if (n < 1) throw ConfigError("pain-point ranking needs N >= 1");
    struct Tally {
        size_t frequency = 0;
        std::vector<std::string> examples;
    };
    std::map<std::string, Tally> tallies;
    for (const auto& item : expanded) {
        if (stopwords.count(item.word)) continue;
        Tally& tally = tallies[item.word];
        ++tally.frequency;
        if (tally.examples.size() < 5 &&
            std::find(tally.examples.begin(), tally.examples.end(), item.doc_id) ==
                tally.examples.end()) {
            tally.examples.push_back(item.doc_id);
        }
    }
    std::vector<std::pair<std::string, Tally>> ranked(tallies.begin(), tallies.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.frequency != b.second.frequency)
            return a.second.frequency > b.second.frequency;
        return a.first < b.first;
    });
    if (ranked.size() > static_cast<size_t>(n)) ranked.resize(static_cast<size_t>(n));

    PainPointSet set;
    set.topic_id = topic_id;
    for (auto& [word, tally] : ranked)
        set.entries.push_back({word, tally.frequency, std::move(tally.examples)});
    return set;
}

namespace {

struct MappedDoc {
    std::vector<int> ids;             // vocabulary indices
    std::vector<size_t> orig_index;   // position in the full token list
};

MappedDoc map_with_positions(const Vocabulary& vocab, const std::vector<std::string>& tokens) {
    MappedDoc out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        const int id = vocab.lookup(tokens[i]);
        if (id < 0) continue;
        out.ids.push_back(id);
        out.orig_index.push_back(i);
    }
    return out;
}

AttributionVector attribute(const TextClassifier& model, const std::vector<int>& doc,
                            int target, AttributionTask task, const ExtractConfig& config) {
    if (config.method == AttributionMethod::IntegratedGradients)
        return integrated_gradients(model, doc, target, task, config.ig_steps);
    return grad_input_attribution(model, doc, target, task);
}

std::vector<ExpandedWord> candidates_for_doc(const CleanReview& review,
                                             const MappedDoc& mapped,
                                             const AttributionVector& attr, int source_topic,
                                             const ExtractConfig& config,
                                             const TaggerConfig& tagger,
                                             const AnnotationStore* annotations) {
    const DocAnnotation annotation = annotate(review.tokens, tagger, annotations, review.id);
    std::vector<ExpandedWord> expanded;
    for (size_t rank : topg_tokens(attr, config.g)) {
        Candidate candidate;
        candidate.doc_id = review.id;
        candidate.token_index = mapped.orig_index[rank];
        candidate.word = review.tokens[candidate.token_index];
        candidate.score = attr.scores[rank];
        candidate.source_topic = source_topic;
        for (auto& word : expand_candidate(candidate, annotation))
            expanded.push_back(std::move(word));
    }
    return expanded;
}

} // namespace

PainPointSet extract_sentiment_painpoints(const std::vector<CleanReview>& corpus,
                                          const Vocabulary& vocab, const TextClassifier& model,
                                          const ExtractConfig& config,
                                          const TaggerConfig& tagger,
                                          const AnnotationStore* annotations) {
    const int negative = static_cast<int>(Sentiment::Negative);
    std::vector<ExpandedWord> expanded;
    size_t negatives = 0;
    for (const auto& review : corpus) {
        if (!review.kept) continue;
        MappedDoc mapped = map_with_positions(vocab, review.tokens);
        if (mapped.ids.empty()) {
            log_warn("doc '" + review.id + "' has no in-vocabulary tokens");
            continue;
        }
        if (predict_class(model, mapped.ids) != negative) continue;
        ++negatives;
        AttributionVector attr =
            attribute(model, mapped.ids, negative, AttributionTask::Sentiment, config);
        for (auto& word :
             candidates_for_doc(review, mapped, attr, -1, config, tagger, annotations))
            expanded.push_back(std::move(word));
    }
    if (negatives == 0)
        log_warn("no review was predicted negative; sentiment pain "
                                    "points are empty");
    return rank_painpoints(expanded, config.stopwords, config.n_sentiment, -1);
}

std::vector<PainPointSet> extract_topic_painpoints(const std::vector<CleanReview>& corpus,
                                                   const Vocabulary& vocab,
                                                   const TextClassifier& model,
                                                   const TopicAssignment& assignment,
                                                   const ExtractConfig& config,
                                                   const TaggerConfig& tagger,
                                                   const AnnotationStore* annotations) {
    std::map<std::string, const CleanReview*> by_id;
    for (const auto& review : corpus)
        if (review.kept) by_id[review.id] = &review;

    std::map<int, std::vector<const CleanReview*>> members;
    for (size_t i = 0; i < assignment.doc_ids.size(); ++i) {
        const int topic = assignment.labels[i];
        if (topic == kOutlierTopic) continue;
        auto it = by_id.find(assignment.doc_ids[i]);
        if (it == by_id.end())
            throw DataError("assignment references unknown doc '" + assignment.doc_ids[i] + "'");
        members[topic].push_back(it->second);
    }

    std::vector<PainPointSet> sets;
    const int m = assignment.num_topics();
    for (int topic = 1; topic <= m; ++topic) {
        auto it = members.find(topic);
        if (it == members.end()) {
            log_warn("topic " + std::to_string(topic) + " has no members; skipped");
            continue;
        }
        if (topic >= model.num_classes)
            throw DataError("topic " + std::to_string(topic) +
                            " is outside the classifier's class range");
        std::vector<ExpandedWord> expanded;
        for (const CleanReview* review : it->second) {
            MappedDoc mapped = map_with_positions(vocab, review->tokens);
            if (mapped.ids.empty()) {
                log_warn("doc '" + review->id + "' has no in-vocabulary tokens");
                continue;
            }
            AttributionVector attr =
                attribute(model, mapped.ids, topic, AttributionTask::Topic, config);
            for (auto& word :
                 candidates_for_doc(*review, mapped, attr, topic, config, tagger, annotations))
                expanded.push_back(std::move(word));
        }
        sets.push_back(rank_painpoints(expanded, config.stopwords, config.n_per_topic, topic));
    }
    return sets;
}

std::string painpoints_to_json(const std::vector<PainPointSet>& sets) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& set : sets) {
        nlohmann::ordered_json entries = nlohmann::ordered_json::array();
        for (const auto& entry : set.entries) {
            entries.push_back({{"word", entry.word},
                               {"frequency", entry.frequency},
                               {"examples", entry.examples}});
        }
        nlohmann::ordered_json item;
        if (set.is_sentiment()) {
            item["scope"] = "sentiment";
        } else {
            item["scope"] = "topic";
            item["topic_id"] = set.topic_id;
        }
        item["entries"] = std::move(entries);
        arr.push_back(std::move(item));
    }
    return arr.dump(2) + "\n";
}

std::vector<PainPointSet> painpoints_from_json(const std::string& text) {
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad pain-point JSON: ") + e.what());
    }
    if (!arr.is_array()) throw DataError("pain-point JSON must be an array");
    std::vector<PainPointSet> sets;
    for (const auto& item : arr) {
        PainPointSet set;
        const std::string scope = item.at("scope").get<std::string>();
        if (scope == "topic") {
            set.topic_id = item.at("topic_id").get<int>();
        } else if (scope == "sentiment") {
            set.topic_id = -1;
        } else {
            throw DataError("unknown pain-point scope '" + scope + "'");
        }
        for (const auto& e : item.at("entries")) {
            PainPointEntry entry;
            entry.word = e.at("word").get<std::string>();
            entry.frequency = e.at("frequency").get<size_t>();
            if (e.contains("examples"))
                for (const auto& id : e["examples"]) entry.examples.push_back(id.get<std::string>());
            set.entries.push_back(std::move(entry));
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

std::string painpoints_to_csv(const std::vector<PainPointSet>& sets) {
    std::string out = "scope,topic_id,rank,word,frequency,examples\n";
    for (const auto& set : sets) {
        const std::string scope = set.is_sentiment() ? "sentiment" : "topic";
        const std::string topic = set.is_sentiment() ? "" : std::to_string(set.topic_id);
        for (size_t r = 0; r < set.entries.size(); ++r) {
            const auto& entry = set.entries[r];
            out += scope;
            out += ',';
            out += topic;
            out += ',';
            out += std::to_string(r + 1);
            out += ',';
            out += entry.word;
            out += ',';
            out += std::to_string(entry.frequency);
            out += ',';
            for (size_t e = 0; e < entry.examples.size(); ++e) {
                if (e > 0) out += ';';
                out += entry.examples[e];
            }
            out += '\n';
        }
    }
    return out;
}

} // namespace painmine
