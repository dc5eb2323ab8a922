#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mdstyle/analysis.hpp"
#include "mdstyle/simulator.hpp"
#include "mdstyle/spectra.hpp"
#include "mdstyle/style_transfer.hpp"

namespace mdstyle {

enum class Scheme { replacement, augmentation };
std::string_view scheme_name(Scheme s) noexcept;
Scheme parse_scheme(std::string_view name);

/// Everything that determines a benchmark run besides the master seed.
struct BenchmarkConfig {
    int per_activity = 60;
    double split_fraction = 0.5;
    std::vector<double> s_values = {0, 20, 40, 60, 80, 100};
    std::vector<Scheme> schemes = {Scheme::replacement, Scheme::augmentation};
    std::vector<Domain> domains = {Domain::styled, Domain::clean, Domain::awgn, Domain::patch};
    int seeds = 3;

    double subject_scale_min = 0.8;
    double subject_scale_max = 1.2;
    double awgn_snr_db = 10.0;
    double patch_quantile = 0.3;
    std::size_t patch_tile_rows = 10;
    std::size_t patch_tile_cols = 10;
    double patch_gain = 0.5;

    std::uint64_t feature_seed = 19;
    int style_iterations = 2500;
    double alpha = 1e-3;
    double beta = 1.0;
    InitMode style_init = InitMode::white_noise;

    int epochs = 100;
    std::size_t batch = 64;
    double lr = 1e-3;

    double perplexity = 30.0;
    int tsne_iterations = 1000;

    RadarConfig radar;
    StftConfig stft;

    void validate() const;
};

/// Named presets: "full" (defaults), "desk" (20 per activity, 300 style
/// iterations, 60 epochs) and "ci" (6 per activity, 300 style iterations,
/// 20 epochs).
BenchmarkConfig profile_config(std::string_view name);

/// key=value lines; '#' starts a comment; blank lines are ignored.
/// Duplicate keys: the last one wins.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> load_key_values(const std::filesystem::path& path);

/// Applies overrides to `cfg`. A "profile" key is applied first. Unknown
/// keys or malformed values throw InvalidArgument.
void apply_overrides(BenchmarkConfig& cfg, const std::map<std::string, std::string>& kv);

/// Canonical key=value rendering (round-trips through apply_overrides).
std::string to_key_values(const BenchmarkConfig& cfg);

/// Style-transfer settings implied by the benchmark config.
StyleTransferConfig style_config(const BenchmarkConfig& cfg, std::uint64_t seed);

}  // namespace mdstyle
