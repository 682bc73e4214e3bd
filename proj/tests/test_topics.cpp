#include <doctest.h>

#include "painmine/errors.hpp"
#include "painmine/topics.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

using namespace painmine;

namespace {

// Three tight direction clusters on the unit sphere.
Eigen::MatrixXd three_clusters(int per_cluster, std::vector<int>& truth, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.05);
    Eigen::MatrixXd points(3 * per_cluster, 3);
    truth.clear();
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < per_cluster; ++i) {
            Eigen::Vector3d p = Eigen::Vector3d::Zero();
            p(c) = 1.0;
            for (int j = 0; j < 3; ++j) p(j) += noise(rng);
            points.row(c * per_cluster + i) = p.normalized();
            truth.push_back(c);
        }
    }
    return points;
}

double choose2(double n) { return n * (n - 1) / 2.0; }

// Adjusted Rand index between two labelings.
double ari(const std::vector<int>& a, const std::vector<int>& b) {
    REQUIRE(a.size() == b.size());
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> row, col;
    for (size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1;
        row[a[i]] += 1;
        col[b[i]] += 1;
    }
    double sum_joint = 0, sum_row = 0, sum_col = 0;
    for (auto& [k, v] : joint) sum_joint += choose2(v);
    for (auto& [k, v] : row) sum_row += choose2(v);
    for (auto& [k, v] : col) sum_col += choose2(v);
    double expected = sum_row * sum_col / choose2(static_cast<double>(a.size()));
    double maximum = (sum_row + sum_col) / 2.0;
    return (sum_joint - expected) / (maximum - expected);
}

TopicSummary summary_with_keywords(int topic_id, std::vector<std::string> keywords) {
    TopicSummary summary;
    summary.topic_id = topic_id;
    summary.size = 3;
    for (const auto& kw : keywords) summary.words.emplace_back(kw, 0.5);
    summary.keywords = std::move(keywords);
    return summary;
}

TopicAssignment assignment_for(int num_topics, int docs_per_topic, int outliers = 0) {
    TopicAssignment assignment;
    int doc = 0;
    for (int t = 1; t <= num_topics; ++t) {
        for (int i = 0; i < docs_per_topic; ++i) {
            assignment.doc_ids.push_back("d" + std::to_string(doc++));
            assignment.labels.push_back(t);
        }
    }
    for (int i = 0; i < outliers; ++i) {
        assignment.doc_ids.push_back("d" + std::to_string(doc++));
        assignment.labels.push_back(kOutlierTopic);
    }
    return assignment;
}

// Reference connected components by breadth-first search.
std::vector<std::vector<int>> reference_components(int n,
                                                   const std::set<std::pair<int, int>>& edges) {
    std::map<int, std::vector<int>> adjacency;
    for (auto& [u, v] : edges) {
        adjacency[u].push_back(v);
        adjacency[v].push_back(u);
    }
    std::vector<std::vector<int>> components;
    std::set<int> seen;
    for (int start = 1; start <= n; ++start) {
        if (seen.count(start)) continue;
        std::vector<int> component, frontier{start};
        seen.insert(start);
        while (!frontier.empty()) {
            int u = frontier.back();
            frontier.pop_back();
            component.push_back(u);
            for (int v : adjacency[u]) {
                if (!seen.count(v)) {
                    seen.insert(v);
                    frontier.push_back(v);
                }
            }
        }
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
    }
    std::sort(components.begin(), components.end());
    return components;
}

} // namespace

TEST_SUITE("topics") {

TEST_CASE("assignment helpers report topic count and sizes") {
    TopicAssignment assignment = assignment_for(2, 3, 1);
    CHECK(assignment.num_topics() == 2);
    auto sizes = assignment.sizes();
    CHECK(sizes[0] == 1);
    CHECK(sizes[1] == 3);
    CHECK(sizes[2] == 3);
}

TEST_CASE("cosine k-means recovers separated clusters exactly") {
    std::vector<int> truth;
    auto points = three_clusters(30, truth, 42);
    auto result = cosine_kmeans(points, 3, 7);
    CHECK(ari(result.cluster, truth) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < 3; ++i)
        CHECK(result.centroids.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*std::min_element(result.similarity.begin(), result.similarity.end()) > 0.9);
}

TEST_CASE("cosine k-means is deterministic in the seed") {
    std::vector<int> truth;
    auto points = three_clusters(20, truth, 43);
    auto a = cosine_kmeans(points, 3, 5);
    auto b = cosine_kmeans(points, 3, 5);
    CHECK(a.cluster == b.cluster);
}

TEST_CASE("silhouette favors the true cluster count") {
    std::vector<int> truth;
    auto points = three_clusters(25, truth, 44);
    double good = mean_silhouette(points, truth);
    std::vector<int> merged = truth;
    for (auto& label : merged)
        if (label == 2) label = 1;
    CHECK(good > mean_silhouette(points, merged));
    CHECK(good > 0.7);
    CHECK(choose_k(points, {2, 3, 4, 5}, 11) == 3);
}

TEST_CASE("initial topics send the weakest quantile to the outlier bin") {
    std::vector<int> truth;
    auto points = three_clusters(10, truth, 45);
    std::vector<std::string> ids;
    for (int i = 0; i < points.rows(); ++i) ids.push_back("d" + std::to_string(i));
    auto assignment = initial_topics(points, ids, 3, 0.2, 9);
    REQUIRE(assignment.labels.size() == 30);
    auto sizes = assignment.sizes();
    CHECK(sizes[kOutlierTopic] == 6); // floor(0.2 * 30)
    CHECK(assignment.num_topics() == 3);
    // Non-outlier labels are densely numbered 1..k.
    std::set<int> seen(assignment.labels.begin(), assignment.labels.end());
    for (int label : seen) CHECK(label <= 3);
}

TEST_CASE("initial topics with zero quantile keeps every doc") {
    std::vector<int> truth;
    auto points = three_clusters(5, truth, 46);
    std::vector<std::string> ids;
    for (int i = 0; i < points.rows(); ++i) ids.push_back("d" + std::to_string(i));
    auto assignment = initial_topics(points, ids, 3, 0.0, 9);
    CHECK(assignment.sizes().count(kOutlierTopic) == 0);
}

TEST_CASE("merging joins topics that share a keyword") {
    std::vector<TopicSummary> summaries{
        summary_with_keywords(1, {"battery", "charge"}),
        summary_with_keywords(2, {"charge", "cable"}),
        summary_with_keywords(3, {"screen"}),
    };
    auto assignment = assignment_for(3, 3, 2);
    auto result = merge_topics(summaries, assignment);
    REQUIRE(result.merged_groups.size() == 2);
    CHECK(result.merged_groups[0] == std::vector<int>{1, 2});
    CHECK(result.merged_groups[1] == std::vector<int>{3});
    CHECK(result.old_to_new.at(1) == 1);
    CHECK(result.old_to_new.at(2) == 1);
    CHECK(result.old_to_new.at(3) == 2);
    // Union summary keeps both keyword sets.
    std::set<std::string> merged_kw(result.summaries[0].keywords.begin(),
                                    result.summaries[0].keywords.end());
    CHECK(merged_kw.count("battery") == 1);
    CHECK(merged_kw.count("cable") == 1);
    // Outlier docs stay outliers.
    CHECK(result.assignment.labels[9] == kOutlierTopic);
    CHECK(result.assignment.labels[10] == kOutlierTopic);
}

TEST_CASE("merging matches reference connected components on random graphs") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + static_cast<int>(rng() % 8);
        std::set<std::pair<int, int>> edges;
        for (int u = 1; u <= n; ++u)
            for (int v = u + 1; v <= n; ++v)
                if (rng() % 4 == 0) edges.insert({u, v});

        std::vector<TopicSummary> summaries;
        for (int u = 1; u <= n; ++u) {
            std::vector<std::string> keywords{"solo" + std::to_string(u)};
            for (auto& [a, b] : edges)
                if (a == u || b == u)
                    keywords.push_back("edge" + std::to_string(a) + "_" + std::to_string(b));
            summaries.push_back(summary_with_keywords(u, std::move(keywords)));
        }
        auto assignment = assignment_for(n, 2, 1);
        auto result = merge_topics(summaries, assignment);

        auto expected = reference_components(n, edges);
        auto actual = result.merged_groups;
        std::sort(actual.begin(), actual.end());
        REQUIRE_MESSAGE(actual == expected, "trial " << trial);

        // Document conservation: same ids, labels only relabeled.
        REQUIRE(result.assignment.doc_ids == assignment.doc_ids);
        for (size_t i = 0; i < assignment.labels.size(); ++i) {
            int old_label = assignment.labels[i];
            int new_label = result.assignment.labels[i];
            if (old_label == kOutlierTopic)
                CHECK(new_label == kOutlierTopic);
            else
                CHECK(new_label == result.old_to_new.at(old_label));
        }

        // Idempotence: merging the merged output changes nothing.
        auto again = merge_topics(result.summaries, result.assignment);
        CHECK(again.merged_groups.size() == result.merged_groups.size());
        CHECK(again.assignment.labels == result.assignment.labels);
    }
}

TEST_CASE("small topics are demoted to outliers and ids renumbered") {
    TopicAssignment assignment;
    for (int i = 0; i < 6; ++i) assignment.labels.push_back(1);
    for (int i = 0; i < 2; ++i) assignment.labels.push_back(2);
    for (int i = 0; i < 5; ++i) assignment.labels.push_back(3);
    for (size_t i = 0; i < assignment.labels.size(); ++i)
        assignment.doc_ids.push_back("d" + std::to_string(i));
    auto adjusted = adjust_minor_topics(assignment, 5);
    auto sizes = adjusted.sizes();
    CHECK(sizes[kOutlierTopic] == 2);
    CHECK(sizes[1] == 6);
    CHECK(sizes[2] == 5);
    CHECK(adjusted.num_topics() == 2);
}

TEST_CASE("assignment csv round-trips") {
    auto assignment = assignment_for(2, 2, 1);
    auto text = assignment_to_csv(assignment);
    auto parsed = assignment_from_csv(text);
    CHECK(parsed.doc_ids == assignment.doc_ids);
    CHECK(parsed.labels == assignment.labels);
}

TEST_CASE("summaries json round-trips") {
    std::vector<TopicSummary> summaries{summary_with_keywords(1, {"battery", "charge"}),
                                        summary_with_keywords(2, {"screen"})};
    summaries[0].words[0].second = 0.125;
    auto parsed = summaries_from_json(summaries_to_json(summaries));
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].topic_id == 1);
    CHECK(parsed[0].keywords == summaries[0].keywords);
    CHECK(parsed[0].words[0].second == 0.125);
    CHECK(parsed[1].size == 3);
}

} // TEST_SUITE
