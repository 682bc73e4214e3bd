#include <doctest.h>

#include "painmine/errors.hpp"
#include "painmine/features.hpp"

#include <cmath>

using namespace painmine;

namespace {

CleanReview make_clean(std::string id, std::vector<std::string> tokens) {
    CleanReview review;
    review.id = std::move(id);
    review.tokens = std::move(tokens);
    review.kept = true;
    return review;
}

double row_score(const std::vector<std::pair<int, double>>& row, int term) {
    for (const auto& [t, v] : row)
        if (t == term) return v;
    return 0.0;
}

} // namespace

TEST_SUITE("features") {

TEST_CASE("vocabulary indexes tokens by first occurrence") {
    std::vector<CleanReview> corpus{make_clean("a", {"x", "y", "x"}),
                                    make_clean("b", {"z", "y"})};
    auto vocab = build_vocab(corpus);
    REQUIRE(vocab.size() == 3);
    CHECK(vocab.lookup("x") == 0);
    CHECK(vocab.lookup("y") == 1);
    CHECK(vocab.lookup("z") == 2);
    CHECK(vocab.lookup("missing") == -1);
    CHECK(vocab.index_to_token[2] == "z");
}

TEST_CASE("vocabulary hash changes with content") {
    auto v1 = build_vocab({make_clean("a", {"x", "y"})});
    auto v2 = build_vocab({make_clean("a", {"x", "z"})});
    auto v3 = build_vocab({make_clean("a", {"x", "y"})});
    CHECK(v1.hash() == v3.hash());
    CHECK(v1.hash() != v2.hash());
}

TEST_CASE("map_tokens drops unknown tokens") {
    auto vocab = build_vocab({make_clean("a", {"x", "y"})});
    auto mapped = map_tokens(vocab, {"x", "unknown", "y", "x"});
    REQUIRE(mapped.size() == 3);
    CHECK(mapped[0] == 0);
    CHECK(mapped[1] == 1);
    CHECK(mapped[2] == 0);
}

TEST_CASE("counts accumulate per document") {
    std::vector<CleanReview> corpus{make_clean("a", {"x", "x", "y"}),
                                    make_clean("b", {"y"})};
    auto vocab = build_vocab(corpus);
    auto counts = count(corpus, vocab);
    REQUIRE(counts.doc_ids.size() == 2);
    CHECK(counts.doc_totals[0] == 3);
    CHECK(counts.doc_totals[1] == 1);
    CHECK(counts.rows[0].size() == 2); // x and y
    CHECK(counts.vocab_size == 2);
}

TEST_CASE("tfidf matches hand computation on a two-doc toy") {
    // d1 = [x x y], d2 = [x z]; N = 2, df(x) = 2, df(y) = df(z) = 1.
    std::vector<CleanReview> corpus{make_clean("d1", {"x", "x", "y"}),
                                    make_clean("d2", {"x", "z"})};
    auto vocab = build_vocab(corpus);
    auto matrix = tfidf(count(corpus, vocab));
    const int x = vocab.lookup("x"), y = vocab.lookup("y"), z = vocab.lookup("z");
    CHECK(row_score(matrix.rows[0], x) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(row_score(matrix.rows[0], y) ==
          doctest::Approx((1.0 / 3.0) * std::log(2.0)).epsilon(1e-12));
    CHECK(row_score(matrix.rows[1], z) ==
          doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("ctfidf matches hand computation on a two-group toy") {
    // Group 1 = [a b], group 2 = [a a].
    // Totals 2 and 2, so the average group length A = 2.
    // Corpus-wide counts: f(a) = 3, f(b) = 1.
    // score(t, c) = (count(t, c) / total(c)) * ln(1 + A / f(t)).
    std::vector<CleanReview> corpus{make_clean("d1", {"a", "b"}),
                                    make_clean("d2", {"a", "a"})};
    auto vocab = build_vocab(corpus);
    auto counts = count(corpus, vocab);
    auto table = ctfidf(counts, {1, 2});
    const int a = vocab.lookup("a"), b = vocab.lookup("b");
    CHECK(table.avg_tokens_per_topic == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(table.score(1, a) == doctest::Approx(0.5 * std::log(5.0 / 3.0)).epsilon(1e-12));
    CHECK(table.score(1, b) == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-12));
    CHECK(table.score(2, a) == doctest::Approx(std::log(5.0 / 3.0)).epsilon(1e-12));
    CHECK(table.score(2, b) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ctfidf groups include the outlier label") {
    std::vector<CleanReview> corpus{make_clean("d1", {"a"}), make_clean("d2", {"b"})};
    auto vocab = build_vocab(corpus);
    auto table = ctfidf(count(corpus, vocab), {0, 1});
    REQUIRE(table.topic_ids.size() == 2);
    CHECK(table.topic_ids[0] == 0);
    CHECK(table.topic_ids[1] == 1);
}

TEST_CASE("ctfidf rejects misaligned labels") {
    std::vector<CleanReview> corpus{make_clean("d1", {"a"})};
    auto vocab = build_vocab(corpus);
    auto counts = count(corpus, vocab);
    CHECK_THROWS_AS(ctfidf(counts, {1, 2}), DataError);
}

TEST_CASE("truncated svd reconstructs a low-rank matrix") {
    Eigen::MatrixXd basis(4, 2);
    basis << 1, 0, 0, 1, 1, 1, 2, -1;
    Eigen::MatrixXd mixing(2, 3);
    mixing << 1, 2, 0, 0, 1, 3;
    Eigen::MatrixXd m = basis * mixing; // rank 2
    auto svd = truncated_svd(m, 2);
    Eigen::MatrixXd rebuilt = svd.U * svd.S.asDiagonal() * svd.V.transpose();
    CHECK((rebuilt - m).norm() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(svd.S(0) >= svd.S(1));
}

TEST_CASE("svd embeddings have unit rows") {
    std::vector<CleanReview> corpus{make_clean("d1", {"a", "b", "c"}),
                                    make_clean("d2", {"a", "d"}),
                                    make_clean("d3", {"e", "f", "g"})};
    auto vocab = build_vocab(corpus);
    auto matrix = tfidf(count(corpus, vocab));
    auto embeddings = svd_embed(matrix, 2);
    REQUIRE(embeddings.rows() == 3);
    for (int i = 0; i < embeddings.rows(); ++i)
        CHECK(embeddings.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("svd embeddings are deterministic") {
    std::vector<CleanReview> corpus{make_clean("d1", {"a", "b"}),
                                    make_clean("d2", {"b", "c"}),
                                    make_clean("d3", {"c", "a"})};
    auto vocab = build_vocab(corpus);
    auto matrix = tfidf(count(corpus, vocab));
    auto e1 = svd_embed(matrix, 2);
    auto e2 = svd_embed(matrix, 2);
    CHECK((e1 - e2).norm() == 0.0);
}

} // TEST_SUITE
