#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mdstyle/analysis.hpp"
#include "mdstyle/classifier.hpp"
#include "mdstyle/config.hpp"

namespace mdstyle {

/// Reference to one image of a bundle.
struct ItemRef {
    Domain domain;
    std::size_t index;
    int activity_id;

    friend bool operator==(const ItemRef&, const ItemRef&) = default;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified split: per activity, round(fraction * n) items (clamped to
/// [1, n-1]) go to train, chosen by a seeded shuffle. Both lists are sorted.
/// Throws when an activity has fewer than 2 items.
SplitIndices split(const std::vector<int>& activity_ids, double fraction, std::uint64_t seed);

/// Five index-aligned image sets: item i of every domain derives from the
/// same activity, subject scale and kinematic seed.
struct DatasetBundle {
    BenchmarkConfig config;
    std::uint64_t master_seed = 0;
    std::vector<int> activity_ids;
    std::vector<std::uint64_t> item_seeds;
    std::vector<double> subject_scales;
    std::array<std::vector<ImageGrid>, kAllDomains.size()> images;
    SplitIndices split;
    std::map<int, std::size_t> exemplars;  // activity -> measured train index used as style image

    std::size_t size() const noexcept { return activity_ids.size(); }
    const std::vector<ImageGrid>& domain(Domain d) const { return images[static_cast<std::size_t>(d)]; }
    const ImageGrid& image(const ItemRef& r) const { return domain(r.domain).at(r.index); }
};

using ProgressFn = std::function<void(const std::string&)>;

/// Builds every domain from (cfg, master_seed). `progress` may be empty.
DatasetBundle build_datasets(const BenchmarkConfig& cfg, std::uint64_t master_seed, const ProgressFn& progress = {});

/// Per activity (ascending), all measured items except the last
/// ceil(s% * n) are kept and the last ceil(s% * n) synthetic items of that
/// activity are added, so the size is unchanged.
std::vector<ItemRef> compose_replacement(const std::vector<ItemRef>& meas_train, const std::vector<ItemRef>& synth,
                                         double s);

/// Per activity, all measured items plus the first ceil(s% * n) synthetic items.
std::vector<ItemRef> compose_augmentation(const std::vector<ItemRef>& meas_train, const std::vector<ItemRef>& synth,
                                          double s);

/// ceil(s/100 * n) with a small tolerance so exact products are not bumped up.
std::size_t synthetic_count(double s, std::size_t n);

std::vector<ItemRef> refs(const DatasetBundle& b, Domain d, const std::vector<std::size_t>& indices);
LabeledSet materialize(const DatasetBundle& b, const std::vector<ItemRef>& items);

/// Writes <dir>/<domain>/<index>.sgrm for every image plus <dir>/manifest.json.
void save_bundle(const DatasetBundle& b, const std::filesystem::path& dir);
std::string manifest_json(const DatasetBundle& b);
/// Reads a directory written by save_bundle.
DatasetBundle load_bundle(const std::filesystem::path& dir);

}  // namespace mdstyle
