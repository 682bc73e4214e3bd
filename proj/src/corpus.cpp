#include "painmine/corpus.hpp"

#include "painmine/errors.hpp"
#include "painmine/features.hpp"
#include "painmine/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace painmine {

std::string sentiment_name(Sentiment s) {
    return s == Sentiment::Positive ? "positive" : "negative";
}

std::optional<Sentiment> parse_sentiment(const std::string& name) {
    if (name == "positive") return Sentiment::Positive;
    if (name == "negative") return Sentiment::Negative;
    return std::nullopt;
}

std::string drop_reason_name(DropReason reason) {
    switch (reason) {
        case DropReason::Duplicate: return "duplicate";
        case DropReason::TooShort: return "too_short";
        case DropReason::NoKeyword: return "no_keyword";
    }
    return "?";
}

std::optional<DropReason> parse_drop_reason(const std::string& name) {
    if (name == "duplicate") return DropReason::Duplicate;
    if (name == "too_short") return DropReason::TooShort;
    if (name == "no_keyword") return DropReason::NoKeyword;
    return std::nullopt;
}

NormalizationRule::NormalizationRule(std::string pattern_text, std::string replacement_text)
    : pattern(std::move(pattern_text)), replacement(std::move(replacement_text)) {
    try {
        compiled = std::regex(pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
        throw ConfigError("invalid normalization rule pattern '" + pattern + "': " + e.what());
    }
}

namespace {

using nlohmann::json;

RawReview review_from_json(const json& obj, size_t line_no, const std::string& source) {
    auto fail = [&](const std::string& what) -> void {
        throw DataError(source + " line " + std::to_string(line_no) + ": " + what);
    };
    if (!obj.is_object()) fail("record is not a JSON object");
    RawReview review;
    if (!obj.contains("id") || !obj["id"].is_string()) fail("missing string field 'id'");
    review.id = obj["id"].get<std::string>();
    if (!obj.contains("text") || !obj["text"].is_string()) fail("missing string field 'text'");
    review.text = obj["text"].get<std::string>();
    if (review.text.empty()) fail("empty 'text' for id '" + review.id + "'");
    if (obj.contains("sentiment") && !obj["sentiment"].is_null()) {
        if (!obj["sentiment"].is_string()) fail("field 'sentiment' must be a string");
        auto s = parse_sentiment(obj["sentiment"].get<std::string>());
        if (!s) fail("sentiment must be 'positive' or 'negative'");
        review.sentiment = s;
    }
    auto opt_string = [&](const char* key) -> std::optional<std::string> {
        if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
        if (!obj[key].is_string()) fail(std::string("field '") + key + "' must be a string");
        return obj[key].get<std::string>();
    };
    review.product_group = opt_string("product_group");
    review.source_type = opt_string("source_type");
    review.timestamp = opt_string("timestamp");
    return review;
}

std::vector<RawReview> parse_jsonl(const std::string& content, const std::string& source) {
    std::vector<RawReview> reviews;
    const auto lines = split_lines(content);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        json obj;
        try {
            obj = json::parse(lines[i]);
        } catch (const json::parse_error& e) {
            throw DataError(source + " line " + std::to_string(i + 1) + ": " + e.what());
        }
        reviews.push_back(review_from_json(obj, i + 1, source));
    }
    return reviews;
}

// Minimal RFC-4180 reader: quoted fields, "" escapes, newlines inside quotes.
std::vector<std::vector<std::string>> parse_csv_records(const std::string& content) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    size_t i = 0;
    auto end_field = [&]() {
        record.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        if (record.size() > 1 || !record[0].empty()) {
            records.push_back(record);
        }
        record.clear();
    };
    while (i < content.size()) {
        char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
        ++i;
    }
    if (!field.empty() || !record.empty()) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        end_record();
    }
    return records;
}

std::vector<RawReview> parse_csv(const std::string& content, const std::string& source) {
    auto records = parse_csv_records(content);
    if (records.empty()) return {};
    std::map<std::string, size_t> columns;
    for (size_t c = 0; c < records[0].size(); ++c) {
        columns[records[0][c]] = c;
    }
    if (!columns.count("id") || !columns.count("text")) {
        throw DataError(source + ": CSV header must contain 'id' and 'text' columns");
    }
    auto cell = [&](const std::vector<std::string>& row, const char* name) -> std::optional<std::string> {
        auto it = columns.find(name);
        if (it == columns.end() || it->second >= row.size()) return std::nullopt;
        if (row[it->second].empty()) return std::nullopt;
        return row[it->second];
    };
    std::vector<RawReview> reviews;
    for (size_t r = 1; r < records.size(); ++r) {
        const auto& row = records[r];
        auto fail = [&](const std::string& what) -> void {
            throw DataError(source + " record " + std::to_string(r) + ": " + what);
        };
        RawReview review;
        auto id = cell(row, "id");
        auto text = cell(row, "text");
        if (!id) fail("missing 'id'");
        if (!text) fail("missing or empty 'text'");
        review.id = *id;
        review.text = *text;
        if (auto s = cell(row, "sentiment")) {
            auto parsed = parse_sentiment(*s);
            if (!parsed) fail("sentiment must be 'positive' or 'negative'");
            review.sentiment = parsed;
        }
        review.product_group = cell(row, "product_group");
        review.source_type = cell(row, "source_type");
        review.timestamp = cell(row, "timestamp");
        reviews.push_back(std::move(review));
    }
    return reviews;
}

void check_unique_ids(const std::vector<RawReview>& reviews, const std::string& source) {
    std::unordered_set<std::string> seen;
    for (const auto& r : reviews) {
        if (!seen.insert(r.id).second) {
            throw DataError(source + ": duplicate review id '" + r.id + "'");
        }
    }
}

} // namespace

std::vector<RawReview> parse_corpus(const std::string& content, CorpusFormat format,
                                    const std::string& source_name) {
    auto reviews = format == CorpusFormat::Jsonl ? parse_jsonl(content, source_name)
                                                 : parse_csv(content, source_name);
    check_unique_ids(reviews, source_name);
    return reviews;
}

std::vector<RawReview> ingest(const std::string& path, CorpusFormat format) {
    return parse_corpus(read_file(path), format, path);
}

std::string normalize(const std::string& text, const std::vector<NormalizationRule>& rules) {
    std::string result = text;
    for (const auto& rule : rules) {
        result = std::regex_replace(result, rule.compiled, rule.replacement);
    }
    std::string collapsed;
    collapsed.reserve(result.size());
    bool pending_space = false;
    for (unsigned char c : result) {
        if (std::isspace(c)) {
            pending_space = !collapsed.empty();
        } else {
            if (pending_space) collapsed.push_back(' ');
            pending_space = false;
            collapsed.push_back(static_cast<char>(c));
        }
    }
    return collapsed;
}

std::vector<CleanReview> prepare_reviews(const std::vector<RawReview>& raws,
                                         const FilterConfig& config) {
    std::vector<CleanReview> cleans;
    cleans.reserve(raws.size());
    for (const auto& raw : raws) {
        CleanReview clean;
        clean.id = raw.id;
        clean.normalized_text = normalize(raw.text, config.normalization_rules);
        clean.tokens = tokenize(clean.normalized_text);
        cleans.push_back(std::move(clean));
    }
    return cleans;
}

KeywordLexicon build_keyword_lexicon(const std::vector<CleanReview>& reviews,
                                     const std::vector<std::optional<Sentiment>>& sentiments,
                                     const std::set<std::string>& stopwords,
                                     int min_negative_freq) {
    if (reviews.size() != sentiments.size()) {
        throw DataError("build_keyword_lexicon: reviews and sentiments are not aligned");
    }
    std::map<std::string, int> counts;
    size_t negatives = 0;
    for (size_t i = 0; i < reviews.size(); ++i) {
        if (sentiments[i] != Sentiment::Negative) continue;
        ++negatives;
        for (const auto& token : reviews[i].tokens) {
            counts[token] += 1;
        }
    }
    if (negatives == 0) {
        throw DataError("build_keyword_lexicon: no negative-labeled reviews");
    }
    KeywordLexicon lexicon;
    lexicon.stopwords = stopwords;
    lexicon.min_negative_freq = min_negative_freq;
    for (const auto& [token, count] : counts) {
        if (count >= min_negative_freq && !stopwords.count(token)) {
            lexicon.keywords.insert(token);
        }
    }
    return lexicon;
}

std::vector<CleanReview> filter(const std::vector<CleanReview>& reviews,
                                const KeywordLexicon& lexicon, const FilterConfig& config) {
    // Smallest id per normalized text decides which duplicate survives.
    std::unordered_map<std::string, std::string> keeper_id;
    if (config.dedupe) {
        for (const auto& r : reviews) {
            auto it = keeper_id.find(r.normalized_text);
            if (it == keeper_id.end() || r.id < it->second) {
                keeper_id[r.normalized_text] = r.id;
            }
        }
    }
    std::vector<CleanReview> out;
    out.reserve(reviews.size());
    for (const auto& r : reviews) {
        CleanReview result = r;
        result.kept = true;
        result.drop_reason.reset();
        if (static_cast<int>(result.tokens.size()) < config.min_tokens) {
            result.kept = false;
            result.drop_reason = DropReason::TooShort;
        } else if (config.dedupe && keeper_id[result.normalized_text] != result.id) {
            result.kept = false;
            result.drop_reason = DropReason::Duplicate;
        } else if (config.require_keyword) {
            bool has_keyword = std::any_of(result.tokens.begin(), result.tokens.end(),
                                           [&](const std::string& t) { return lexicon.keywords.count(t) > 0; });
            if (!has_keyword) {
                result.kept = false;
                result.drop_reason = DropReason::NoKeyword;
            }
        }
        out.push_back(std::move(result));
    }
    return out;
}

std::set<std::string> load_stopwords(const std::string& path) {
    std::set<std::string> stopwords;
    for (const auto& line : split_lines(read_file(path))) {
        if (!line.empty()) stopwords.insert(line);
    }
    return stopwords;
}

std::vector<NormalizationRule> load_normalization_rules(const std::string& path) {
    std::vector<NormalizationRule> rules;
    const auto lines = split_lines(read_file(path));
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        size_t tab = lines[i].find('\t');
        if (tab == std::string::npos) {
            throw ConfigError(path + " line " + std::to_string(i + 1) +
                              ": expected 'pattern<TAB>replacement'");
        }
        rules.emplace_back(lines[i].substr(0, tab), lines[i].substr(tab + 1));
    }
    return rules;
}

} // namespace painmine
