#include <doctest.h>

#include "painmine/corpus.hpp"
#include "painmine/errors.hpp"
#include "painmine/util.hpp"

#include <algorithm>
#include <filesystem>

using namespace painmine;

namespace {

RawReview make_raw(std::string id, std::string text,
                   std::optional<Sentiment> sentiment = std::nullopt) {
    RawReview raw;
    raw.id = std::move(id);
    raw.text = std::move(text);
    raw.sentiment = sentiment;
    return raw;
}

// Ten distinct filler words so a review clears min_tokens = 10.
const std::string kPad = " one two three four five six seven eight nine ten";

} // namespace

TEST_SUITE("corpus") {

TEST_CASE("sentiment names round-trip") {
    CHECK(sentiment_name(Sentiment::Positive) == "positive");
    CHECK(sentiment_name(Sentiment::Negative) == "negative");
    CHECK(parse_sentiment("positive") == Sentiment::Positive);
    CHECK(parse_sentiment("negative") == Sentiment::Negative);
    CHECK_FALSE(parse_sentiment("meh").has_value());
}

TEST_CASE("jsonl parsing keeps ids, text, and optional fields") {
    std::string content =
        R"({"id": "r1", "text": "Battery drains fast", "sentiment": "negative"})"
        "\n"
        R"({"id": "r2", "text": "Works fine", "product_group": "audio"})"
        "\n";
    auto raws = parse_corpus(content, CorpusFormat::Jsonl, "test");
    REQUIRE(raws.size() == 2);
    CHECK(raws[0].id == "r1");
    CHECK(raws[0].sentiment == Sentiment::Negative);
    CHECK_FALSE(raws[1].sentiment.has_value());
    CHECK(raws[1].product_group == "audio");
}

TEST_CASE("csv parsing handles quoted fields") {
    std::string content = "id,text,sentiment\n"
                          "r1,\"good, really good\",positive\n"
                          "r2,bad,negative\n";
    auto raws = parse_corpus(content, CorpusFormat::Csv, "test");
    REQUIRE(raws.size() == 2);
    CHECK(raws[0].text == "good, really good");
    CHECK(raws[1].sentiment == Sentiment::Negative);
}

TEST_CASE("malformed input raises DataError") {
    CHECK_THROWS_AS(parse_corpus("not json\n", CorpusFormat::Jsonl, "test"), DataError);
}

TEST_CASE("normalization applies rules in order and collapses whitespace") {
    std::vector<NormalizationRule> rules;
    rules.emplace_back("batery", "battery");
    rules.emplace_back("&", " and ");
    CHECK(normalize("the batery &\tcharger ", rules) == "the battery and charger");
}

TEST_CASE("prepare_reviews lowercases and tokenizes") {
    auto cleans = prepare_reviews({make_raw("r1", "The BATTERY, drains!")}, FilterConfig{});
    REQUIRE(cleans.size() == 1);
    REQUIRE(cleans[0].tokens.size() == 3);
    CHECK(cleans[0].tokens[0] == "the");
    CHECK(cleans[0].tokens[1] == "battery");
    CHECK(cleans[0].tokens[2] == "drains");
}

TEST_CASE("lexicon keeps negative tokens at or above the frequency floor") {
    // Six negative reviews; 'battery' appears in all six, 'noise' in two,
    // and the stopword 'the' everywhere.
    std::vector<RawReview> raws;
    for (int i = 0; i < 6; ++i) {
        std::string text = "the battery fails";
        if (i < 2) text += " noise";
        raws.push_back(make_raw("r" + std::to_string(i), text, Sentiment::Negative));
    }
    auto cleans = prepare_reviews(raws, FilterConfig{});
    std::vector<std::optional<Sentiment>> sentiments(raws.size(), Sentiment::Negative);
    auto lexicon = build_keyword_lexicon(cleans, sentiments, {"the"}, 5);
    CHECK(lexicon.keywords.count("battery") == 1);
    CHECK(lexicon.keywords.count("fails") == 1);
    CHECK(lexicon.keywords.count("noise") == 0); // below min_negative_freq
    CHECK(lexicon.keywords.count("the") == 0);   // stopword
}

TEST_CASE("lexicon requires negative labels and alignment") {
    auto cleans = prepare_reviews({make_raw("r1", "fine")}, FilterConfig{});
    std::vector<std::optional<Sentiment>> sentiments{Sentiment::Positive};
    CHECK_THROWS_AS(build_keyword_lexicon(cleans, sentiments, {}, 5), DataError);
    CHECK_THROWS_AS(build_keyword_lexicon(cleans, {}, {}, 5), DataError);
}

TEST_CASE("filter drops short docs, duplicates, and keyword-free docs in that order") {
    std::vector<RawReview> raws;
    raws.push_back(make_raw("r1", "battery broke" + kPad));  // kept
    raws.push_back(make_raw("r2", "too short"));             // too_short
    raws.push_back(make_raw("r3", "battery broke" + kPad));  // duplicate of r1
    raws.push_back(make_raw("r4", "lovely product" + kPad)); // no keyword
    auto cleans = prepare_reviews(raws, FilterConfig{});
    KeywordLexicon lexicon;
    lexicon.keywords = {"battery"};
    auto filtered = filter(cleans, lexicon, FilterConfig{});
    REQUIRE(filtered.size() == 4);
    CHECK(filtered[0].kept);
    CHECK_FALSE(filtered[1].kept);
    CHECK(filtered[1].drop_reason == DropReason::TooShort);
    CHECK(filtered[2].drop_reason == DropReason::Duplicate);
    CHECK(filtered[3].drop_reason == DropReason::NoKeyword);
}

TEST_CASE("dedupe keeps the smallest id") {
    std::vector<RawReview> raws;
    raws.push_back(make_raw("r9", "battery broke" + kPad));
    raws.push_back(make_raw("r2", "battery broke" + kPad));
    auto cleans = prepare_reviews(raws, FilterConfig{});
    KeywordLexicon lexicon;
    lexicon.keywords = {"battery"};
    auto filtered = filter(cleans, lexicon, FilterConfig{});
    REQUIRE(filtered.size() == 2);
    CHECK(filtered[0].id == "r9");
    CHECK(filtered[0].drop_reason == DropReason::Duplicate);
    CHECK(filtered[1].id == "r2");
    CHECK(filtered[1].kept);
}

TEST_CASE("a short duplicate is reported as too_short") {
    std::vector<RawReview> raws;
    raws.push_back(make_raw("r1", "bad battery"));
    raws.push_back(make_raw("r2", "bad battery"));
    auto cleans = prepare_reviews(raws, FilterConfig{});
    KeywordLexicon lexicon;
    lexicon.keywords = {"battery"};
    auto filtered = filter(cleans, lexicon, FilterConfig{});
    CHECK(filtered[0].drop_reason == DropReason::TooShort);
    CHECK(filtered[1].drop_reason == DropReason::TooShort);
}

TEST_CASE("filter toggles respect the config") {
    std::vector<RawReview> raws;
    raws.push_back(make_raw("r1", "nice enough" + kPad));
    raws.push_back(make_raw("r2", "nice enough" + kPad));
    auto cleans = prepare_reviews(raws, FilterConfig{});
    KeywordLexicon lexicon;
    lexicon.keywords = {"battery"};
    FilterConfig config;
    config.dedupe = false;
    config.require_keyword = false;
    auto filtered = filter(cleans, lexicon, config);
    CHECK(filtered[0].kept);
    CHECK(filtered[1].kept);
}

TEST_CASE("stopword and normalization files load") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "painmine_corpus_test";
    fs::create_directories(dir);
    write_file((dir / "stop.txt").string(), "the\nand\n\n");
    auto stops = load_stopwords((dir / "stop.txt").string());
    CHECK(stops.size() == 2);
    CHECK(stops.count("the") == 1);
    CHECK(stops.count("and") == 1);

    write_file((dir / "norm.tsv").string(), "batery\tbattery\n");
    auto rules = load_normalization_rules((dir / "norm.tsv").string());
    REQUIRE(rules.size() == 1);
    CHECK(normalize("batery life", rules) == "battery life");
    fs::remove_all(dir);
}

} // TEST_SUITE
