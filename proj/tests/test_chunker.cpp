#include <doctest.h>

#include "painmine/chunker.hpp"
#include "painmine/errors.hpp"
#include "painmine/util.hpp"

#include <filesystem>
#include <random>
#include <regex>

using namespace painmine;

namespace {

std::vector<PosTaggedToken> tag_sequence(const std::string& letters) {
    std::vector<PosTaggedToken> tagged;
    for (char c : letters) {
        PosTag tag = PosTag::Other;
        switch (c) {
        case 'N': tag = PosTag::Noun; break;
        case 'V': tag = PosTag::Verb; break;
        case 'J': tag = PosTag::Adj; break;
        case 'R': tag = PosTag::Adv; break;
        case 'D': tag = PosTag::Det; break;
        case 'P': tag = PosTag::Pron; break;
        case 'A': tag = PosTag::Adp; break;
        default: tag = PosTag::Other; break;
        }
        tagged.push_back({std::string(1, c), tag});
    }
    return tagged;
}

// Independent reference chunker: greedy left-to-right regex matching over the
// tag letters, noun phrases before verb phrases.
std::vector<PhraseChunk> reference_chunks(const std::string& letters) {
    static const std::regex np_re("^D?J*N+");
    static const std::regex vp_re("^R*V+J*");
    std::vector<PhraseChunk> chunks;
    size_t i = 0;
    while (i < letters.size()) {
        std::smatch m;
        std::string rest = letters.substr(i);
        if (std::regex_search(rest, m, np_re)) {
            size_t len = m[0].length();
            chunks.push_back({ChunkKind::NP, i, i + len, i + len - 1});
            i += len;
        } else if (std::regex_search(rest, m, vp_re)) {
            size_t len = m[0].length();
            size_t advs = m[0].str().find('V');
            chunks.push_back({ChunkKind::VP, i, i + len, i + advs});
            i += len;
        } else {
            ++i;
        }
    }
    return chunks;
}

} // namespace

TEST_SUITE("chunker") {

TEST_CASE("lexicon entries beat suffix rules") {
    auto tagger = TaggerConfig::english_defaults();
    auto tagged = pos_tag({"spring", "running", "slowly", "kindness", "famous"}, tagger);
    CHECK(tagged[0].tag == PosTag::Noun); // lexicon exception to the -ing rule
    CHECK(tagged[1].tag == PosTag::Verb); // -ing suffix
    CHECK(tagged[2].tag == PosTag::Adv);  // -ly suffix
    CHECK(tagged[3].tag == PosTag::Noun); // -ness suffix
    CHECK(tagged[4].tag == PosTag::Adj);  // -ous suffix
}

TEST_CASE("suffix rules need two extra leading characters") {
    auto tagger = TaggerConfig::english_defaults();
    // 'bed' is too short for the -ed rule, so it falls back to the default.
    auto tagged = pos_tag({"bed", "sanded"}, tagger);
    CHECK(tagged[0].tag == PosTag::Noun);
    CHECK(tagged[1].tag == PosTag::Verb);
}

TEST_CASE("unknown words default to noun") {
    auto tagger = TaggerConfig::english_defaults();
    CHECK(pos_tag({"blorp"}, tagger)[0].tag == PosTag::Noun);
}

TEST_CASE("a determiner plus noun forms a noun phrase headed by the noun") {
    auto chunks = chunk(tag_sequence("DN")); // e.g. "the battery"
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].kind == ChunkKind::NP);
    CHECK(chunks[0].start == 0);
    CHECK(chunks[0].end == 2);
    CHECK(chunks[0].head == 1);
}

TEST_CASE("a verb plus adjective forms a verb phrase headed by the verb") {
    auto chunks = chunk(tag_sequence("VJ")); // e.g. "drains fast"
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].kind == ChunkKind::VP);
    CHECK(chunks[0].start == 0);
    CHECK(chunks[0].end == 2);
    CHECK(chunks[0].head == 0);
}

TEST_CASE("compound nouns form one phrase headed by the last noun") {
    auto chunks = chunk(tag_sequence("DNN")); // e.g. "the heater thermostat"
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].kind == ChunkKind::NP);
    CHECK(chunks[0].end == 3);
    CHECK(chunks[0].head == 2);
}

TEST_CASE("adverbs attach to the following verb") {
    auto chunks = chunk(tag_sequence("RRVJ"));
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].kind == ChunkKind::VP);
    CHECK(chunks[0].head == 2);
}

TEST_CASE("chunking matches a regex reference on random tag sequences") {
    const std::string alphabet = "NVJRDPAO";
    std::mt19937_64 rng(321);
    for (int trial = 0; trial < 200; ++trial) {
        std::string letters;
        size_t len = rng() % 13;
        for (size_t i = 0; i < len; ++i)
            letters.push_back(alphabet[rng() % alphabet.size()]);
        auto expected = reference_chunks(letters);
        auto actual = chunk(tag_sequence(letters));
        REQUIRE_MESSAGE(actual.size() == expected.size(), "tags: " << letters);
        for (size_t i = 0; i < expected.size(); ++i) {
            CHECK_MESSAGE(actual[i].kind == expected[i].kind, "tags: " << letters);
            CHECK_MESSAGE(actual[i].start == expected[i].start, "tags: " << letters);
            CHECK_MESSAGE(actual[i].end == expected[i].end, "tags: " << letters);
            CHECK_MESSAGE(actual[i].head == expected[i].head, "tags: " << letters);
        }
    }
}

TEST_CASE("chunk_at finds the covering chunk") {
    auto chunks = chunk(tag_sequence("DNVJ"));
    REQUIRE(chunks.size() == 2);
    CHECK(chunk_at(chunks, 0) == 0);
    CHECK(chunk_at(chunks, 1) == 0);
    CHECK(chunk_at(chunks, 2) == 1);
    CHECK(chunk_at(chunks, 9) == -1);
}

TEST_CASE("a verb phrase relates to the nearest noun phrase on its left") {
    auto chunks = chunk(tag_sequence("NVN"));
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[1].kind == ChunkKind::VP);
    CHECK(related_np(chunks, 1) == 0);
}

TEST_CASE("a leading verb phrase relates to the noun phrase on its right") {
    auto chunks = chunk(tag_sequence("VN"));
    REQUIRE(chunks.size() == 2);
    CHECK(related_np(chunks, 0) == 1);
}

TEST_CASE("a lone verb phrase has no related noun phrase") {
    auto chunks = chunk(tag_sequence("V"));
    REQUIRE(chunks.size() == 1);
    CHECK(related_np(chunks, 0) == -1);
}

TEST_CASE("annotate prefers stored annotations and falls back to the tagger") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "painmine_chunker_test";
    fs::create_directories(dir);
    auto path = (dir / "ann.tsv").string();
    write_file(path,
               "doc_id\ttoken_index\ttoken\ttag\tchunk_kind\tchunk_id\thead_index\n"
               "d1\t0\tthe\tDET\tNP\t0\t1\n"
               "d1\t1\tbattery\tNOUN\tNP\t0\t1\n"
               "d1\t2\tdrains\tVERB\tVP\t1\t2\n");
    CleanReview review;
    review.id = "d1";
    review.tokens = {"the", "battery", "drains"};
    auto store = load_annotations(path, {review});
    REQUIRE(store.has("d1"));

    auto tagger = TaggerConfig::english_defaults();
    auto from_store = annotate(review.tokens, tagger, &store, "d1");
    REQUIRE(from_store.chunks.size() == 2);
    CHECK(from_store.chunks[0].kind == ChunkKind::NP);
    CHECK(from_store.chunks[0].head == 1);
    CHECK(from_store.chunks[1].kind == ChunkKind::VP);

    auto fallback = annotate(review.tokens, tagger, &store, "d2");
    REQUIRE(fallback.tags.size() == 3);
    CHECK(fallback.tags[0].tag == PosTag::Det);
    fs::remove_all(dir);
}

TEST_CASE("annotation loading validates coverage and head indices") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "painmine_chunker_test2";
    fs::create_directories(dir);
    auto path = (dir / "ann.tsv").string();
    CleanReview review;
    review.id = "d1";
    review.tokens = {"a", "b"};

    write_file(path, "d1\t0\ta\tNOUN\tNP\t0\t0\n"); // covers 1 of 2 tokens
    CHECK_THROWS_AS(load_annotations(path, {review}), DataError);

    write_file(path, "d1\t0\ta\tNOUN\tNP\t0\t5\nd1\t1\tb\tNOUN\tNP\t0\t5\n");
    CHECK_THROWS_AS(load_annotations(path, {review}), DataError); // head outside chunk

    write_file(path, "dX\t0\ta\tNOUN\tO\t\t\n");
    CHECK_THROWS_AS(load_annotations(path, {review}), DataError); // unknown doc
    fs::remove_all(dir);
}

} // TEST_SUITE
