#pragma once

#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace painmine {

enum class Sentiment { Positive, Negative };

std::string sentiment_name(Sentiment s);
std::optional<Sentiment> parse_sentiment(const std::string& name);

struct RawReview {
    std::string id;
    std::string text;
    std::optional<Sentiment> sentiment;
    std::optional<std::string> product_group;
    std::optional<std::string> source_type;
    std::optional<std::string> timestamp;
};

enum class DropReason { Duplicate, TooShort, NoKeyword };

std::string drop_reason_name(DropReason reason);
std::optional<DropReason> parse_drop_reason(const std::string& name);

struct CleanReview {
    std::string id;
    std::vector<std::string> tokens;
    std::string normalized_text;
    bool kept = true;
    std::optional<DropReason> drop_reason;
};

struct KeywordLexicon {
    std::set<std::string> keywords;
    std::set<std::string> stopwords;
    int min_negative_freq = 5;
};

// A pattern -> replacement rewrite. Patterns are ECMAScript regexes and
// are compiled at construction; a bad pattern is a ConfigError.
struct NormalizationRule {
    std::string pattern;
    std::string replacement;
    std::regex compiled;

    NormalizationRule(std::string pattern_text, std::string replacement_text);
};

struct FilterConfig {
    int min_tokens = 10;
    bool dedupe = true;
    bool require_keyword = true;
    std::vector<NormalizationRule> normalization_rules;
};

enum class CorpusFormat { Jsonl, Csv };

// One RawReview per record. Malformed records and duplicate ids are
// DataErrors that name the offending line/id.
std::vector<RawReview> ingest(const std::string& path, CorpusFormat format);
std::vector<RawReview> parse_corpus(const std::string& content, CorpusFormat format,
                                    const std::string& source_name);

// Applies the rules in order, then collapses whitespace runs and trims.
// Idempotent as long as rule outputs do not re-trigger rule patterns.
std::string normalize(const std::string& text, const std::vector<NormalizationRule>& rules);

// normalize + tokenize each raw review; kept=true, no drop reason yet.
std::vector<CleanReview> prepare_reviews(const std::vector<RawReview>& raws,
                                         const FilterConfig& config);

// Keywords = tokens occurring at least min_negative_freq times across
// negative-labeled reviews, minus stopwords. `sentiments` is aligned with
// `reviews` by position.
KeywordLexicon build_keyword_lexicon(const std::vector<CleanReview>& reviews,
                                     const std::vector<std::optional<Sentiment>>& sentiments,
                                     const std::set<std::string>& stopwords,
                                     int min_negative_freq);

// Marks each review kept or dropped with exactly one reason. Checks are
// applied in order: too_short, duplicate, no_keyword. Within a group of
// identical normalized texts the lexicographically smallest id survives.
std::vector<CleanReview> filter(const std::vector<CleanReview>& reviews,
                                const KeywordLexicon& lexicon, const FilterConfig& config);

// One token per line, UTF-8. Blank lines ignored.
std::set<std::string> load_stopwords(const std::string& path);

// Rules file: one rule per line, pattern TAB replacement.
std::vector<NormalizationRule> load_normalization_rules(const std::string& path);

} // namespace painmine
