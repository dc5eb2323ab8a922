#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mdstyle/simulator.hpp"
#include "mdstyle/surf.hpp"
#include "mdstyle/tsne.hpp"

namespace mdstyle {

enum class Domain { measured, clean, awgn, patch, styled };
inline constexpr std::array<Domain, 5> kAllDomains = {Domain::measured, Domain::clean, Domain::awgn, Domain::patch,
                                                      Domain::styled};
std::string_view domain_name(Domain d) noexcept;
/// Inverse of domain_name; nullopt for unknown names.
std::optional<Domain> parse_domain(std::string_view name) noexcept;

struct CloudPoint {
    std::array<double, 2> xy;
    int activity_id;
    Domain domain;
};

struct EmbeddingCloud {
    std::vector<CloudPoint> points;
};

struct EmbeddedImage {
    int activity_id;
    Domain domain;
    std::array<double, kEmbeddingSize> embedding;
};

/// Runs one t-SNE per activity over that activity's embeddings from every
/// domain. The per-activity seed is derive_seed(cfg.seed, activity); the
/// perplexity is lowered to floor((n - 1) / 3) when an activity has too few
/// points for cfg.perplexity. Output order follows the input order.
EmbeddingCloud embed_per_activity(const std::vector<EmbeddedImage>& items, const TsneConfig& cfg);

/// Synthetic domains in table column order.
inline constexpr std::array<Domain, 4> kTableDomains = {Domain::clean, Domain::styled, Domain::awgn, Domain::patch};

/// Distance from the measured centroid to each synthetic domain's centroid
/// (per-domain mean of the 2-D points), per activity, plus column means.
struct DistanceTable {
    std::array<std::array<double, kTableDomains.size()>, kNumActivities> rows{};
    std::array<double, kTableDomains.size()> mean{};
};

/// Throws InvalidArgument naming the first (activity, domain) pair without points.
DistanceTable centroid_distance_table(const EmbeddingCloud& cloud);

}  // namespace mdstyle
