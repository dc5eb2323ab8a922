#include "mdstyle/analysis.hpp"

#include <cmath>
#include <string>

namespace mdstyle {

std::string_view domain_name(Domain d) noexcept {
    switch (d) {
        case Domain::measured: return "measured";
        case Domain::clean: return "clean";
        case Domain::awgn: return "awgn";
        case Domain::patch: return "patch";
        case Domain::styled: return "styled";
    }
    return "?";
}

std::optional<Domain> parse_domain(std::string_view name) noexcept {
    for (Domain d : kAllDomains)
        if (domain_name(d) == name) return d;
    return std::nullopt;
}

EmbeddingCloud embed_per_activity(const std::vector<EmbeddedImage>& items, const TsneConfig& cfg) {
    EmbeddingCloud cloud;
    cloud.points.resize(items.size());
    for (int a = 1; a <= kNumActivities; ++a) {
        std::vector<std::size_t> idx;
        std::vector<std::vector<double>> x;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (items[i].activity_id != a) continue;
            idx.push_back(i);
            x.emplace_back(items[i].embedding.begin(), items[i].embedding.end());
        }
        if (idx.empty()) continue;
        TsneConfig c = cfg;
        c.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(a));
        const double n = static_cast<double>(x.size());
        if (!(c.perplexity * 3.0 < n)) c.perplexity = std::floor((n - 1.0) / 3.0);
        const TsneResult r = tsne(x, c);
        for (std::size_t k = 0; k < idx.size(); ++k)
            cloud.points[idx[k]] = {r.points[k], a, items[idx[k]].domain};
    }
    for (const auto& item : items)
        require(valid_activity(item.activity_id), "embedded image has an invalid activity id");
    return cloud;
}

DistanceTable centroid_distance_table(const EmbeddingCloud& cloud) {
    constexpr std::size_t D = kAllDomains.size();
    std::array<std::array<std::array<double, 2>, D>, kNumActivities> sum{};
    std::array<std::array<std::size_t, D>, kNumActivities> count{};
    for (const auto& p : cloud.points) {
        require(valid_activity(p.activity_id), "cloud point has an invalid activity id");
        require(std::isfinite(p.xy[0]) && std::isfinite(p.xy[1]), "cloud point is not finite");
        const auto a = static_cast<std::size_t>(p.activity_id - 1);
        const auto d = static_cast<std::size_t>(p.domain);
        sum[a][d][0] += p.xy[0];
        sum[a][d][1] += p.xy[1];
        ++count[a][d];
    }
    for (std::size_t a = 0; a < kNumActivities; ++a)
        for (Domain d : kAllDomains)
            if (count[a][static_cast<std::size_t>(d)] == 0)
                throw InvalidArgument("no points for activity " + std::to_string(a + 1) + " in domain " +
                                      std::string(domain_name(d)));

    DistanceTable t;
    for (std::size_t a = 0; a < kNumActivities; ++a) {
        auto centroid = [&](Domain d) {
            const auto k = static_cast<std::size_t>(d);
            const double n = static_cast<double>(count[a][k]);
            return std::array<double, 2>{sum[a][k][0] / n, sum[a][k][1] / n};
        };
        const auto m = centroid(Domain::measured);
        for (std::size_t col = 0; col < kTableDomains.size(); ++col) {
            const auto c = centroid(kTableDomains[col]);
            t.rows[a][col] = std::hypot(c[0] - m[0], c[1] - m[1]);
            t.mean[col] += t.rows[a][col] / kNumActivities;
        }
    }
    return t;
}

}  // namespace mdstyle
