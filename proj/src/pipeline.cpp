#include "painmine/pipeline.hpp"

#include "painmine/errors.hpp"
#include "painmine/eval.hpp"
#include "painmine/log.hpp"
#include "painmine/synth.hpp"
#include "painmine/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>

namespace painmine {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string artifact(const PipelineConfig& config, const char* name) {
    return (fs::path(config.output_dir) / name).string();
}

bool file_exists(const std::string& path) { return fs::exists(fs::path(path)); }

CorpusFormat resolve_format(const PipelineConfig& config) {
    if (config.format == "jsonl") return CorpusFormat::Jsonl;
    if (config.format == "csv") return CorpusFormat::Csv;
    if (config.format == "auto") {
        auto ext = fs::path(config.input).extension().string();
        return ext == ".csv" ? CorpusFormat::Csv : CorpusFormat::Jsonl;
    }
    throw ConfigError("unknown corpus format '" + config.format + "'");
}

struct CleanCorpus {
    std::vector<CleanReview> reviews;                 // kept docs only
    std::vector<std::optional<Sentiment>> sentiments; // aligned with reviews
};

std::string clean_to_jsonl(const CleanCorpus& corpus) {
    std::string out;
    for (size_t i = 0; i < corpus.reviews.size(); ++i) {
        const auto& review = corpus.reviews[i];
        nlohmann::ordered_json record{{"id", review.id},
                                      {"text", review.normalized_text},
                                      {"tokens", review.tokens}};
        if (corpus.sentiments[i]) record["sentiment"] = sentiment_name(*corpus.sentiments[i]);
        out += record.dump();
        out += '\n';
    }
    return out;
}

CleanCorpus clean_from_jsonl(const std::string& text) {
    CleanCorpus corpus;
    const auto lines = split_lines(text);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("clean corpus line " + std::to_string(i + 1) + ": " + e.what());
        }
        CleanReview review;
        review.id = record.at("id").get<std::string>();
        review.normalized_text = record.at("text").get<std::string>();
        for (const auto& token : record.at("tokens"))
            review.tokens.push_back(token.get<std::string>());
        review.kept = true;
        std::optional<Sentiment> sentiment;
        if (record.contains("sentiment")) {
            sentiment = parse_sentiment(record["sentiment"].get<std::string>());
            if (!sentiment)
                throw DataError("clean corpus line " + std::to_string(i + 1) +
                                ": bad sentiment value");
        }
        corpus.reviews.push_back(std::move(review));
        corpus.sentiments.push_back(sentiment);
    }
    return corpus;
}

CleanCorpus load_clean(const PipelineConfig& config) {
    const std::string path = artifact(config, "clean.jsonl");
    if (!file_exists(path))
        throw DataError("missing artifact " + path + "; run the preprocess stage first");
    CleanCorpus corpus = clean_from_jsonl(read_file(path));
    if (corpus.reviews.empty()) throw DataError("clean corpus is empty");
    return corpus;
}

std::set<std::string> load_config_stopwords(const PipelineConfig& config) {
    if (config.stopwords_path.empty())
        throw ConfigError("paths.stopwords is required for this stage");
    return load_stopwords(config.stopwords_path);
}

// Representative-word summaries for an assignment, recomputed from counts.
std::vector<TopicSummary> summaries_for(const CleanCorpus& corpus, const Vocabulary& vocab,
                                        const TopicAssignment& assignment,
                                        const MergeConfig& merge) {
    DocTermCounts counts = count(corpus.reviews, vocab);
    CTfidfTable table = ctfidf(counts, assignment.labels);
    return representative_words(assignment, table, vocab, merge,
                                TaggerConfig::english_defaults());
}

TopicAssignment load_assignment(const PipelineConfig& config, const char* name) {
    const std::string path = artifact(config, name);
    if (!file_exists(path)) throw DataError("missing artifact " + path);
    return assignment_from_csv(read_file(path));
}

void check_alignment(const CleanCorpus& corpus, const TopicAssignment& assignment,
                     const char* name) {
    if (assignment.doc_ids.size() != corpus.reviews.size())
        throw DataError(std::string(name) + " does not cover the clean corpus");
    for (size_t i = 0; i < corpus.reviews.size(); ++i) {
        if (assignment.doc_ids[i] != corpus.reviews[i].id)
            throw DataError(std::string(name) + " is misaligned with the clean corpus at '" +
                            assignment.doc_ids[i] + "'");
    }
}

// ---- stages -------------------------------------------------------------

StageResult stage_ingest(const PipelineConfig& config) {
    StageResult result{"ingest", 0.0, {}};
    if (config.input.empty()) throw ConfigError("paths.input is required");
    std::vector<RawReview> raws = ingest(config.input, resolve_format(config));
    log_info("ingest: " + std::to_string(raws.size()) + " reviews from " +
                                    config.input);
    const std::string out = artifact(config, "ingested.jsonl");
    write_file(out, reviews_to_jsonl(raws));
    result.artifacts.push_back(out);
    return result;
}

StageResult stage_preprocess(const PipelineConfig& config) {
    StageResult result{"preprocess", 0.0, {}};
    if (config.input.empty()) throw ConfigError("paths.input is required");
    std::vector<RawReview> raws = ingest(config.input, resolve_format(config));
    std::set<std::string> stopwords = load_config_stopwords(config);

    FilterConfig filter_config = config.filter;
    if (!config.normalization_path.empty())
        filter_config.normalization_rules = load_normalization_rules(config.normalization_path);

    std::vector<CleanReview> prepared = prepare_reviews(raws, filter_config);
    std::vector<std::optional<Sentiment>> sentiments;
    sentiments.reserve(raws.size());
    bool any_negative = false;
    for (const auto& raw : raws) {
        sentiments.push_back(raw.sentiment);
        if (raw.sentiment == Sentiment::Negative) any_negative = true;
    }

    KeywordLexicon lexicon;
    lexicon.stopwords = stopwords;
    lexicon.min_negative_freq = config.min_negative_freq;
    if (any_negative) {
        lexicon = build_keyword_lexicon(prepared, sentiments, stopwords,
                                        config.min_negative_freq);
    } else if (filter_config.require_keyword) {
        throw ConfigError("the corpus has no negative-labeled reviews, so no keyword "
                          "lexicon can be built; set filter.require_keyword = false");
    }

    std::vector<CleanReview> filtered = filter(prepared, lexicon, filter_config);

    CleanCorpus kept;
    std::string dropped;
    size_t dropped_count = 0;
    for (size_t i = 0; i < filtered.size(); ++i) {
        if (filtered[i].kept) {
            kept.reviews.push_back(filtered[i]);
            kept.sentiments.push_back(sentiments[i]);
        } else {
            nlohmann::ordered_json record{
                {"id", filtered[i].id},
                {"reason", drop_reason_name(*filtered[i].drop_reason)}};
            dropped += record.dump();
            dropped += '\n';
            ++dropped_count;
        }
    }
    if (kept.reviews.empty()) throw DataError("every review was filtered out");

    nlohmann::ordered_json lexicon_json{
        {"min_negative_freq", lexicon.min_negative_freq},
        {"keywords", std::vector<std::string>(lexicon.keywords.begin(), lexicon.keywords.end())}};

    const std::string clean_path = artifact(config, "clean.jsonl");
    const std::string dropped_path = artifact(config, "dropped.jsonl");
    const std::string lexicon_path = artifact(config, "lexicon.json");
    write_file(clean_path, clean_to_jsonl(kept));
    write_file(dropped_path, dropped);
    write_file(lexicon_path, lexicon_json.dump(2) + "\n");
    result.artifacts = {clean_path, dropped_path, lexicon_path};
    log_info("preprocess: kept " + std::to_string(kept.reviews.size()) +
                                    ", dropped " + std::to_string(dropped_count) +
                                    ", lexicon " + std::to_string(lexicon.keywords.size()) +
                                    " keywords");
    return result;
}

StageResult stage_train_sentiment(const PipelineConfig& config) {
    StageResult result{"train-sent", 0.0, {}};
    CleanCorpus corpus = load_clean(config);
    Vocabulary vocab = build_vocab(corpus.reviews);

    std::vector<std::vector<int>> docs;
    std::vector<int> labels;
    for (size_t i = 0; i < corpus.reviews.size(); ++i) {
        if (!corpus.sentiments[i]) continue;
        docs.push_back(map_tokens(vocab, corpus.reviews[i].tokens));
        labels.push_back(static_cast<int>(*corpus.sentiments[i]));
    }
    if (docs.empty()) throw DataError("no sentiment-labeled reviews to train on");
    const bool has_pos = std::find(labels.begin(), labels.end(),
                                   static_cast<int>(Sentiment::Positive)) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(),
                                   static_cast<int>(Sentiment::Negative)) != labels.end();
    if (!has_pos || !has_neg)
        throw DataError("sentiment training needs both positive and negative reviews");

    TextClassifier model = init_classifier(vocab.size(), 2, config.sentiment);
    model.vocab_hash = vocab.hash();
    Trainer trainer(std::move(model), config.sentiment);
    std::vector<EpochStats> stats = trainer.run(docs, labels, config.sentiment.epochs);

    std::vector<int> predictions;
    predictions.reserve(docs.size());
    for (const auto& doc : docs) predictions.push_back(predict_class(trainer.model(), doc));
    ClassificationReport report = classification_report(predictions, labels);

    nlohmann::ordered_json epochs = nlohmann::ordered_json::array();
    for (const auto& s : stats) {
        epochs.push_back({{"loss", format_double(s.loss)},
                          {"accuracy", format_double(s.accuracy)}});
    }
    nlohmann::ordered_json metrics{
        {"labeled_docs", docs.size()},
        {"epochs", std::move(epochs)},
        {"train_accuracy", format_double(report.accuracy)},
        {"train_macro_f1", format_double(report.macro_f1)},
        {"recall_positive", format_double(report.recall[static_cast<int>(Sentiment::Positive)])},
        {"recall_negative", format_double(report.recall[static_cast<int>(Sentiment::Negative)])}};

    const std::string model_path = artifact(config, "sent_model.json");
    const std::string metrics_path = artifact(config, "sent_metrics.json");
    write_file(model_path, save_classifier(trainer.model()));
    write_file(metrics_path, metrics.dump(2) + "\n");
    result.artifacts = {model_path, metrics_path};
    log_info("train-sent: accuracy " + format_double(report.accuracy) +
                                    " over " + std::to_string(docs.size()) + " labeled docs");
    return result;
}

StageResult stage_topics_init(const PipelineConfig& config) {
    StageResult result{"topics-init", 0.0, {}};
    CleanCorpus corpus = load_clean(config);
    Vocabulary vocab = build_vocab(corpus.reviews);
    DocTermCounts counts = count(corpus.reviews, vocab);
    TfidfMatrix matrix = tfidf(counts);

    const int n = static_cast<int>(corpus.reviews.size());
    const int d = std::max(1, std::min({config.svd_dim, n, vocab.size()}));
    Eigen::MatrixXd embeddings = svd_embed(matrix, d);

    int k = config.k;
    if (k <= 0) {
        std::vector<int> candidates;
        for (int c : {8, 12, 16, 20, 24})
            if (c < n) candidates.push_back(c);
        if (candidates.empty()) candidates.push_back(std::max(2, n / 2));
        k = choose_k(embeddings, candidates, config.seed + 2);
        log_info("topics-init: silhouette picked k=" + std::to_string(k));
    }

    std::vector<std::string> doc_ids;
    for (const auto& review : corpus.reviews) doc_ids.push_back(review.id);
    TopicAssignment assignment =
        initial_topics(embeddings, doc_ids, k, config.outlier_quantile, config.seed + 2);
    auto summaries = summaries_for(corpus, vocab, assignment, config.merge);

    const std::string assignment_path = artifact(config, "assignment_init.csv");
    const std::string summary_path = artifact(config, "summaries_init.json");
    write_file(assignment_path, assignment_to_csv(assignment));
    write_file(summary_path, summaries_to_json(summaries));
    result.artifacts = {assignment_path, summary_path};
    log_info("topics-init: " + std::to_string(assignment.num_topics()) +
                                    " topics, outlier ratio " +
                                    format_double(outlier_ratio(assignment)));
    return result;
}

StageResult stage_topics_merge(const PipelineConfig& config) {
    StageResult result{"topics-merge", 0.0, {}};
    CleanCorpus corpus = load_clean(config);
    Vocabulary vocab = build_vocab(corpus.reviews);
    TopicAssignment initial = load_assignment(config, "assignment_init.csv");
    check_alignment(corpus, initial, "assignment_init.csv");
    const std::string summary_path = artifact(config, "summaries_init.json");
    if (!file_exists(summary_path)) throw DataError("missing artifact " + summary_path);
    auto summaries = summaries_from_json(read_file(summary_path));

    MergeResult merged = merge_topics(summaries, initial);
    TopicAssignment adjusted = adjust_minor_topics(merged.assignment, config.merge.min_topic_size);
    auto final_summaries = summaries_for(corpus, vocab, adjusted, config.merge);

    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (const auto& group : merged.merged_groups) groups.push_back(group);
    nlohmann::ordered_json old_to_new = nlohmann::ordered_json::object();
    for (const auto& [old_id, new_id] : merged.old_to_new)
        old_to_new[std::to_string(old_id)] = new_id;
    nlohmann::ordered_json log_json{{"topics_before", initial.num_topics()},
                                    {"topics_after_merge", merged.assignment.num_topics()},
                                    {"topics_after_adjust", adjusted.num_topics()},
                                    {"groups", std::move(groups)},
                                    {"old_to_new", std::move(old_to_new)}};

    const std::string assignment_path = artifact(config, "assignment_merged.csv");
    const std::string merged_summary_path = artifact(config, "summaries_merged.json");
    const std::string log_path = artifact(config, "merge_log.json");
    write_file(assignment_path, assignment_to_csv(adjusted));
    write_file(merged_summary_path, summaries_to_json(final_summaries));
    write_file(log_path, log_json.dump(2) + "\n");
    result.artifacts = {assignment_path, merged_summary_path, log_path};
    log_info("topics-merge: " + std::to_string(initial.num_topics()) +
                                    " -> " + std::to_string(adjusted.num_topics()) + " topics");
    return result;
}

StageResult stage_itm(const PipelineConfig& config) {
    StageResult result{"itm", 0.0, {}};
    CleanCorpus corpus = load_clean(config);
    Vocabulary vocab = build_vocab(corpus.reviews);
    TopicAssignment merged = load_assignment(config, "assignment_merged.csv");
    check_alignment(corpus, merged, "assignment_merged.csv");

    DocTermCounts counts = count(corpus.reviews, vocab);
    std::vector<std::vector<std::string>> token_docs;
    std::vector<std::vector<int>> docs;
    for (const auto& review : corpus.reviews) {
        token_docs.push_back(review.tokens);
        docs.push_back(map_tokens(vocab, review.tokens));
    }
    CooccurrenceCounts cooccurrence = count_cooccurrence(token_docs);

    ItmState state = run_itm(docs, counts, cooccurrence, vocab, merged, config.itm);
    auto final_summaries = summaries_for(corpus, vocab, state.labels, config.merge);

    nlohmann::ordered_json state_json{
        {"steps_run", state.steps_run},
        {"stop_reason", state.stop_reason},
        {"initial_npmi", format_double(state.initial_npmi)},
        {"initial_outlier_ratio", format_double(state.initial_outlier)},
        {"final_npmi",
         format_double(state.history.empty() ? state.initial_npmi : state.history.back().npmi)},
        {"final_outlier_ratio", format_double(outlier_ratio(state.labels))}};

    const std::string assignment_path = artifact(config, "assignment_final.csv");
    const std::string history_path = artifact(config, "itm_history.jsonl");
    const std::string model_path = artifact(config, "topic_model.json");
    const std::string state_path = artifact(config, "itm_state.json");
    const std::string summary_path = artifact(config, "summaries_final.json");
    write_file(assignment_path, assignment_to_csv(state.labels));
    write_file(history_path, history_to_jsonl(state));
    write_file(model_path, save_classifier(state.classifier));
    write_file(state_path, state_json.dump(2) + "\n");
    write_file(summary_path, summaries_to_json(final_summaries));
    result.artifacts = {assignment_path, history_path, model_path, state_path, summary_path};
    log_info("itm: " + std::to_string(state.steps_run) + " steps, stop=" +
                                    state.stop_reason + ", outlier ratio " +
                                    format_double(outlier_ratio(state.labels)));
    return result;
}

StageResult stage_extract(const PipelineConfig& config) {
    StageResult result{"extract", 0.0, {}};
    CleanCorpus corpus = load_clean(config);
    Vocabulary vocab = build_vocab(corpus.reviews);

    ExtractConfig extract = config.extract;
    extract.stopwords = load_config_stopwords(config);
    TaggerConfig tagger = TaggerConfig::english_defaults();

    AnnotationStore annotations;
    const AnnotationStore* annotations_ptr = nullptr;
    if (!config.annotations_path.empty()) {
        annotations = load_annotations(config.annotations_path, corpus.reviews);
        annotations_ptr = &annotations;
    }

    const std::string sent_model_path = artifact(config, "sent_model.json");
    const std::string topic_model_path = artifact(config, "topic_model.json");
    bool extracted_any = false;

    if (file_exists(sent_model_path)) {
        TextClassifier model = load_classifier(read_file(sent_model_path));
        if (model.vocab_hash != vocab.hash())
            throw DataError("sentiment model was trained on a different corpus (vocabulary "
                            "hash mismatch)");
        PainPointSet set = extract_sentiment_painpoints(corpus.reviews, vocab, model, extract,
                                                        tagger, annotations_ptr);
        std::vector<PainPointSet> sets{std::move(set)};
        const std::string json_path = artifact(config, "painpoints_sentiment.json");
        const std::string csv_path = artifact(config, "painpoints_sentiment.csv");
        write_file(json_path, painpoints_to_json(sets));
        write_file(csv_path, painpoints_to_csv(sets));
        result.artifacts.push_back(json_path);
        result.artifacts.push_back(csv_path);
        extracted_any = true;
    } else {
        log_warn("no sentiment model artifact; skipping sentiment pain "
                                    "points");
    }

    if (file_exists(topic_model_path)) {
        TopicAssignment final_assignment = load_assignment(config, "assignment_final.csv");
        check_alignment(corpus, final_assignment, "assignment_final.csv");
        TextClassifier model = load_classifier(read_file(topic_model_path));
        if (model.vocab_hash != vocab.hash())
            throw DataError("topic model was trained on a different corpus (vocabulary hash "
                            "mismatch)");
        std::vector<PainPointSet> sets = extract_topic_painpoints(
            corpus.reviews, vocab, model, final_assignment, extract, tagger, annotations_ptr);
        const std::string json_path = artifact(config, "painpoints_topics.json");
        const std::string csv_path = artifact(config, "painpoints_topics.csv");
        write_file(json_path, painpoints_to_json(sets));
        write_file(csv_path, painpoints_to_csv(sets));
        result.artifacts.push_back(json_path);
        result.artifacts.push_back(csv_path);
        extracted_any = true;
    } else {
        log_warn("no topic model artifact; skipping topic pain points");
    }

    if (!extracted_any)
        throw DataError("extract needs at least one of sent_model.json / topic_model.json");
    return result;
}

StageResult stage_evaluate(const PipelineConfig& config) {
    StageResult result{"evaluate", 0.0, {}};
    CleanCorpus corpus = load_clean(config);
    Vocabulary vocab = build_vocab(corpus.reviews);

    nlohmann::ordered_json metrics;

    size_t dropped_count = 0;
    const std::string dropped_path = artifact(config, "dropped.jsonl");
    if (file_exists(dropped_path)) {
        for (const auto& line : split_lines(read_file(dropped_path)))
            if (!line.empty()) ++dropped_count;
    }
    metrics["corpus"] = {{"docs_kept", corpus.reviews.size()},
                         {"docs_dropped", dropped_count}};

    const std::string final_path = artifact(config, "assignment_final.csv");
    if (file_exists(final_path)) {
        TopicAssignment assignment = assignment_from_csv(read_file(final_path));
        check_alignment(corpus, assignment, "assignment_final.csv");
        auto summaries = summaries_for(corpus, vocab, assignment, config.merge);
        std::vector<std::vector<std::string>> token_docs;
        for (const auto& review : corpus.reviews) token_docs.push_back(review.tokens);
        CooccurrenceCounts cooccurrence = count_cooccurrence(token_docs);
        CoherenceReport coherence =
            topic_coherence(summaries, cooccurrence, config.merge.top_r);
        nlohmann::ordered_json per_topic = nlohmann::ordered_json::object();
        for (const auto& [topic, value] : coherence.per_topic)
            per_topic[std::to_string(topic)] = format_double(value);
        metrics["topics"] = {{"num_topics", assignment.num_topics()},
                             {"outlier_ratio", format_double(outlier_ratio(assignment))},
                             {"npmi_mean", format_double(coherence.mean)},
                             {"npmi_per_topic", std::move(per_topic)}};
    } else {
        metrics["topics"] = nullptr;
        log_warn("no final assignment; topic metrics skipped");
    }

    const std::string sent_model_path = artifact(config, "sent_model.json");
    bool have_labels = false;
    for (const auto& sentiment : corpus.sentiments)
        if (sentiment) have_labels = true;
    if (file_exists(sent_model_path) && have_labels) {
        TextClassifier model = load_classifier(read_file(sent_model_path));
        if (model.vocab_hash != vocab.hash())
            throw DataError("sentiment model was trained on a different corpus (vocabulary "
                            "hash mismatch)");
        std::vector<int> predictions, golds;
        for (size_t i = 0; i < corpus.reviews.size(); ++i) {
            if (!corpus.sentiments[i]) continue;
            predictions.push_back(
                predict_class(model, map_tokens(vocab, corpus.reviews[i].tokens)));
            golds.push_back(static_cast<int>(*corpus.sentiments[i]));
        }
        ClassificationReport report = classification_report(predictions, golds);
        metrics["sentiment"] = {
            {"accuracy", format_double(report.accuracy)},
            {"macro_f1", format_double(report.macro_f1)},
            {"recall_positive",
             format_double(report.recall[static_cast<int>(Sentiment::Positive)])},
            {"recall_negative",
             format_double(report.recall[static_cast<int>(Sentiment::Negative)])}};
    } else {
        metrics["sentiment"] = nullptr;
        log_warn("no sentiment model or no gold labels; sentiment metrics "
                                    "skipped");
    }

    const std::string metrics_path = artifact(config, "metrics.json");
    write_file(metrics_path, metrics.dump(2) + "\n");
    result.artifacts = {metrics_path};
    return result;
}

// ---- report -------------------------------------------------------------

std::string markdown_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '|' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

void render_painpoint_table(std::string& md, const PainPointSet& set) {
    if (set.entries.empty()) {
        md += "_no pain points extracted_\n\n";
        return;
    }
    md += "| rank | word | frequency | examples |\n";
    md += "| ---: | --- | ---: | --- |\n";
    for (size_t i = 0; i < set.entries.size(); ++i) {
        const auto& entry = set.entries[i];
        std::string examples;
        for (size_t e = 0; e < entry.examples.size(); ++e) {
            if (e > 0) examples += ", ";
            examples += entry.examples[e];
        }
        md += "| " + std::to_string(i + 1) + " | " + markdown_escape(entry.word) + " | " +
              std::to_string(entry.frequency) + " | " + markdown_escape(examples) + " |\n";
    }
    md += '\n';
}

StageResult stage_report(const PipelineConfig& config) {
    StageResult result{"report", 0.0, {}};
    nlohmann::ordered_json report;
    std::string md = "# Pain Point Report\n\n";

    // Corpus + metrics.
    nlohmann::json metrics;
    const std::string metrics_path = artifact(config, "metrics.json");
    if (file_exists(metrics_path)) {
        metrics = nlohmann::json::parse(read_file(metrics_path));
        report["metrics"] = metrics;
    } else {
        report["metrics"] = "missing";
    }

    md += "## Corpus\n\n";
    if (metrics.contains("corpus")) {
        md += "| metric | value |\n| --- | ---: |\n";
        md += "| reviews kept | " + metrics["corpus"]["docs_kept"].dump() + " |\n";
        md += "| reviews dropped | " + metrics["corpus"]["docs_dropped"].dump() + " |\n\n";
    } else {
        md += "_stage missing: run evaluate to populate corpus statistics_\n\n";
    }

    // Sentiment pain points.
    md += "## Sentiment Pain Points\n\n";
    const std::string sent_path = artifact(config, "painpoints_sentiment.json");
    if (file_exists(sent_path)) {
        auto sets = painpoints_from_json(read_file(sent_path));
        report["sentiment_painpoints"] = nlohmann::json::parse(painpoints_to_json(sets));
        if (sets.empty()) {
            md += "_no pain points extracted_\n\n";
        } else {
            md += "Words ranked by frequency across reviews predicted negative.\n\n";
            render_painpoint_table(md, sets.front());
        }
    } else {
        report["sentiment_painpoints"] = "missing";
        md += "_stage missing: no sentiment pain-point artifact found_\n\n";
    }

    // Topics.
    md += "## Topics\n\n";
    const std::string summaries_path = artifact(config, "summaries_final.json");
    const std::string topic_pp_path = artifact(config, "painpoints_topics.json");
    if (file_exists(summaries_path)) {
        auto summaries = summaries_from_json(read_file(summaries_path));
        report["topic_summaries"] = nlohmann::json::parse(summaries_to_json(summaries));
        std::vector<PainPointSet> sets;
        if (file_exists(topic_pp_path)) {
            sets = painpoints_from_json(read_file(topic_pp_path));
            report["topic_painpoints"] = nlohmann::json::parse(painpoints_to_json(sets));
        } else {
            report["topic_painpoints"] = "missing";
        }
        if (summaries.empty()) {
            md += "_no non-outlier topics_\n\n";
        }
        for (const auto& summary : summaries) {
            md += "### Topic " + std::to_string(summary.topic_id) + " (size " +
                  std::to_string(summary.size) + ")\n\n";
            std::string words;
            for (size_t i = 0; i < summary.words.size(); ++i) {
                if (i > 0) words += ", ";
                words += summary.words[i].first;
            }
            md += "Representative words: " + markdown_escape(words) + "\n\n";
            if (!summary.keywords.empty()) {
                std::string keywords;
                for (size_t i = 0; i < summary.keywords.size(); ++i) {
                    if (i > 0) keywords += ", ";
                    keywords += summary.keywords[i];
                }
                md += "Keywords: " + markdown_escape(keywords) + "\n\n";
            }
            bool found = false;
            for (const auto& set : sets) {
                if (set.topic_id != summary.topic_id) continue;
                render_painpoint_table(md, set);
                found = true;
                break;
            }
            if (!found) md += "_no pain points for this topic_\n\n";
        }
    } else {
        report["topic_summaries"] = "missing";
        report["topic_painpoints"] = "missing";
        md += "_stage missing: no topic summary artifact found_\n\n";
    }

    // Metrics section of the markdown report.
    md += "## Metrics\n\n";
    if (!metrics.is_null() && !metrics.empty()) {
        md += "| metric | value |\n| --- | ---: |\n";
        if (metrics.contains("topics") && !metrics["topics"].is_null()) {
            md += "| topics | " + metrics["topics"]["num_topics"].dump() + " |\n";
            md += "| outlier ratio | " +
                  metrics["topics"]["outlier_ratio"].get<std::string>() + " |\n";
            md += "| mean NPMI | " + metrics["topics"]["npmi_mean"].get<std::string>() +
                  " |\n";
        }
        if (metrics.contains("sentiment") && !metrics["sentiment"].is_null()) {
            md += "| sentiment accuracy | " +
                  metrics["sentiment"]["accuracy"].get<std::string>() + " |\n";
            md += "| sentiment macro F1 | " +
                  metrics["sentiment"]["macro_f1"].get<std::string>() + " |\n";
        }
        md += '\n';
    } else {
        md += "_stage missing: no metrics artifact found_\n\n";
    }

    const std::string json_path = artifact(config, "report.json");
    const std::string md_path = artifact(config, "report.md");
    write_file(json_path, report.dump(2) + "\n");
    write_file(md_path, md);
    result.artifacts = {json_path, md_path};
    return result;
}

using StageFn = StageResult (*)(const PipelineConfig&);

const std::vector<std::pair<std::string, StageFn>>& stage_table() {
    static const std::vector<std::pair<std::string, StageFn>> table = {
        {"ingest", stage_ingest},         {"preprocess", stage_preprocess},
        {"train-sent", stage_train_sentiment}, {"topics-init", stage_topics_init},
        {"topics-merge", stage_topics_merge},  {"itm", stage_itm},
        {"extract", stage_extract},       {"evaluate", stage_evaluate},
        {"report", stage_report},
    };
    return table;
}

} // namespace

const std::vector<std::string>& pipeline_stage_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : stage_table()) out.push_back(name);
        return out;
    }();
    return names;
}

StageResult run_stage(const std::string& name, const PipelineConfig& config) {
    fs::create_directories(fs::path(config.output_dir));
    for (const auto& [stage_name, fn] : stage_table()) {
        if (stage_name != name) continue;
        const auto start = std::chrono::steady_clock::now();
        StageResult result = fn(config);
        const auto end = std::chrono::steady_clock::now();
        result.millis = std::chrono::duration<double, std::milli>(end - start).count();
        return result;
    }
    throw ConfigError("unknown stage '" + name + "'");
}

RunManifest run_pipeline(const PipelineConfig& config) {
    RunManifest manifest;
    manifest.version = kVersion;
    manifest.config_hash = to_hex(fnv1a64(config.config_text));

    if (config.input.empty() || !file_exists(config.input))
        throw ConfigError("input corpus not found: '" + config.input + "'");
    if (config.stopwords_path.empty() || !file_exists(config.stopwords_path))
        throw ConfigError("stopword list not found: '" + config.stopwords_path + "'");
    if (!config.normalization_path.empty() && !file_exists(config.normalization_path))
        throw ConfigError("normalization rules not found: '" + config.normalization_path + "'");
    if (!config.annotations_path.empty() && !file_exists(config.annotations_path))
        throw ConfigError("annotation file not found: '" + config.annotations_path + "'");
    fs::create_directories(fs::path(config.output_dir));

    for (const auto& name : pipeline_stage_names()) {
        try {
            manifest.stages.push_back(run_stage(name, config));
        } catch (const std::exception& e) {
            manifest.failed_stage = name;
            manifest.error = e.what();
            break;
        }
    }
    write_file(artifact(config, "manifest.json"), manifest_to_json(manifest));
    return manifest;
}

std::string manifest_to_json(const RunManifest& manifest) {
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& stage : manifest.stages) {
        stages.push_back({{"name", stage.name},
                          {"millis", format_double(stage.millis)},
                          {"artifacts", stage.artifacts}});
    }
    nlohmann::ordered_json out{{"version", manifest.version},
                               {"config_hash", manifest.config_hash},
                               {"stages", std::move(stages)}};
    if (manifest.failed_stage.empty()) {
        out["failed_stage"] = nullptr;
    } else {
        out["failed_stage"] = manifest.failed_stage;
        out["error"] = manifest.error;
    }
    return out.dump(2) + "\n";
}

} // namespace painmine
