#include <doctest.h>

#include <cmath>
#include <random>

#include "mdstyle/analysis.hpp"
#include "mdstyle/common.hpp"
#include "mdstyle/kmeans.hpp"
#include "mdstyle/tsne.hpp"

using namespace mdstyle;

namespace {

std::vector<std::vector<double>> two_clusters(std::size_t per, std::size_t dim, double gap, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.5);
    std::vector<std::vector<double>> x;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < per; ++i) {
            std::vector<double> p(dim);
            for (auto& v : p) v = g(rng);
            p[0] += c * gap;
            x.push_back(std::move(p));
        }
    return x;
}

// Mean silhouette over 2-D points with known labels.
double silhouette(const std::vector<std::array<double, 2>>& y, const std::vector<int>& label) {
    const std::size_t n = y.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double same = 0.0, other = 0.0;
        int ns = 0, no = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = std::hypot(y[i][0] - y[j][0], y[i][1] - y[j][1]);
            if (label[j] == label[i]) {
                same += d;
                ++ns;
            } else {
                other += d;
                ++no;
            }
        }
        const double a = same / ns, b = other / no;
        total += (b - a) / std::max(a, b);
    }
    return total / static_cast<double>(n);
}

}  // namespace

TEST_CASE("conditional affinities: rows are distributions at the target perplexity") {
    const auto x = two_clusters(15, 4, 3.0, 2);
    const std::size_t n = x.size();
    const auto p = conditional_affinities(x, 5.0);
    REQUIRE(p.size() == n * n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0, h = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = p[i * n + j];
            CHECK(v >= 0.0);
            sum += v;
            if (v > 0.0) h -= v * std::log(v);
        }
        CHECK(p[i * n + i] == 0.0);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::exp(h) == doctest::Approx(5.0).epsilon(1e-3));
    }
    CHECK_THROWS_AS(conditional_affinities({{0.0}}, 5.0), InvalidArgument);
    CHECK_THROWS_AS(conditional_affinities(x, 1.0), InvalidArgument);
}

TEST_CASE("tsne separates two distant clusters") {
    const auto x = two_clusters(50, 128, 20.0, 7);
    std::vector<int> label(100);
    for (std::size_t i = 50; i < 100; ++i) label[i] = 1;
    TsneConfig cfg;
    cfg.seed = 3;
    const auto r = tsne(x, cfg);
    REQUIRE(r.points.size() == 100);
    REQUIRE(r.kl.size() == 1000);
    CHECK(silhouette(r.points, label) >= 0.5);
    for (double k : r.kl) CHECK(k >= 0.0);
    for (std::size_t t = 250; t + 50 < r.kl.size(); ++t) CHECK(r.kl[t + 50] <= r.kl[t] + 1e-6);

    const auto again = tsne(x, cfg);
    CHECK(again.points == r.points);
}

TEST_CASE("tsne argument errors") {
    const auto x = two_clusters(2, 3, 1.0, 1);
    CHECK_THROWS_AS(tsne(x), InvalidArgument);  // 4 points
    const auto y = two_clusters(10, 3, 1.0, 1);
    TsneConfig cfg;
    cfg.perplexity = 7.0;  // needs n > 21
    CHECK_THROWS_AS(tsne(y, cfg), InvalidArgument);
}

TEST_CASE("kmeans examples") {
    SUBCASE("single cluster centroid is the mean") {
        const auto r = kmeans({{0, 0}, {2, 0}}, 1, 1);
        CHECK(r.centroids[0][0] == doctest::Approx(1.0));
        CHECK(r.centroids[0][1] == doctest::Approx(0.0));
        CHECK(r.wcss.back() == doctest::Approx(2.0));
    }
    SUBCASE("two far pairs") {
        const std::vector<std::vector<double>> x = {{0, 0}, {0, 1}, {100, 100}, {100, 101}};
        const auto r = kmeans(x, 2, 5);
        CHECK(r.assignments[0] == r.assignments[1]);
        CHECK(r.assignments[2] == r.assignments[3]);
        CHECK(r.assignments[0] != r.assignments[2]);
        CHECK(r.wcss.back() == doctest::Approx(1.0));
    }
    SUBCASE("more clusters never increase WCSS and Lloyd is monotone") {
        const auto x = two_clusters(30, 5, 4.0, 9);
        const auto one = kmeans(x, 1, 2);
        const auto two = kmeans(x, 2, 2);
        CHECK(two.wcss.back() <= one.wcss.back());
        for (std::size_t i = 1; i < two.wcss.size(); ++i) CHECK(two.wcss[i] <= two.wcss[i - 1] + 1e-9);
    }
    CHECK_THROWS_AS(kmeans({{0.0}, {1.0}}, 3, 1), InvalidArgument);
}

TEST_CASE("centroid distance table") {
    EmbeddingCloud cloud;
    for (int a = 1; a <= kNumActivities; ++a)
        for (Domain d : kAllDomains) {
            const double off = d == Domain::measured ? 0.0 : static_cast<double>(static_cast<int>(d));
            cloud.points.push_back({{off + 1.0, 0.0}, a, d});
            cloud.points.push_back({{off - 1.0, 0.0}, a, d});
        }
    const auto t = centroid_distance_table(cloud);
    // clean=1, styled=4, awgn=2, patch=3 along x
    const double want[4] = {1.0, 4.0, 2.0, 3.0};
    for (const auto& row : t.rows)
        for (std::size_t k = 0; k < 4; ++k) CHECK(row[k] == doctest::Approx(want[k]));
    for (std::size_t k = 0; k < 4; ++k) CHECK(t.mean[k] == doctest::Approx(want[k]));

    SUBCASE("translation invariant") {
        auto moved = cloud;
        for (auto& p : moved.points) p.xy = {p.xy[0] + 17.0, p.xy[1] - 3.0};
        const auto u = centroid_distance_table(moved);
        for (std::size_t a = 0; a < t.rows.size(); ++a)
            for (std::size_t k = 0; k < 4; ++k) CHECK(u.rows[a][k] == doctest::Approx(t.rows[a][k]));
    }
    SUBCASE("identical domains give zero") {
        auto same = cloud;
        for (std::size_t i = 0; i < same.points.size(); ++i) same.points[i].xy = {i % 2 ? -1.0 : 1.0, 0.0};
        const auto u = centroid_distance_table(same);
        for (const auto& row : u.rows)
            for (double v : row) CHECK(v == doctest::Approx(0.0));
    }
    SUBCASE("missing pair") {
        auto gap = cloud;
        std::erase_if(gap.points, [](const CloudPoint& p) { return p.activity_id == 4 && p.domain == Domain::patch; });
        CHECK_THROWS_AS(centroid_distance_table(gap), InvalidArgument);
    }
}

TEST_CASE("embed_per_activity keeps input order and is deterministic") {
    std::vector<EmbeddedImage> items;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 0.1);
    for (int a = 1; a <= 2; ++a)
        for (Domain d : kAllDomains)
            for (int k = 0; k < 3; ++k) {
                EmbeddedImage e{a, d, {}};
                for (auto& v : e.embedding) v = g(rng) + (d == Domain::measured ? 0.0 : 5.0);
                items.push_back(e);
            }
    TsneConfig cfg;
    cfg.seed = 8;
    cfg.iterations = 300;
    const auto cloud = embed_per_activity(items, cfg);
    REQUIRE(cloud.points.size() == items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        CHECK(cloud.points[i].activity_id == items[i].activity_id);
        CHECK(cloud.points[i].domain == items[i].domain);
    }
    CHECK(embed_per_activity(items, cfg).points.front().xy == cloud.points.front().xy);
}
