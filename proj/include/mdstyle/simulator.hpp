#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include "mdstyle/image.hpp"
#include "mdstyle/spectra.hpp"

namespace mdstyle {

inline constexpr int kNumActivities = 10;

/// Short label for activities 1..10.
std::string_view activity_name(int activity_id);
bool valid_activity(int activity_id) noexcept;

struct RadarConfig {
    double carrier_hz = 2.472e9;
    double sample_rate_hz = 2000.0;
    double duration_s = 10.0;  // upper bound on profile duration
    double c_mps = 2.9979e8;
    double max_expected_doppler_hz = 125.0;

    void validate() const;
};

/// How a spectrogram becomes a fixed-size image.
struct RenderConfig {
    double band_hz = 125.0;          // keep |f| <= band_hz
    double dynamic_range_db = 50.0;  // [peak - range, peak] -> [0,1]
    int out_rows = 100;
    int out_cols = 100;
};

struct Keyframe {
    double t_s;
    double range_m;
};

/// Sinusoidal range excursion with raised-cosine on/off ramps.
struct Oscillation {
    double amplitude_m = 0.0;
    double freq_hz = 0.0;
    double phase_rad = 0.0;
    double t_on = 0.0;
    double t_off = std::numeric_limits<double>::infinity();
    double ramp_s = 0.2;

    double offset_at(double t) const noexcept;
};

inline constexpr double kMinTrackRange = 0.3;
inline constexpr double kMaxTrackRange = 6.0;

/// Point scatterer: piecewise-linear path plus optional oscillations.
struct ScattererTrack {
    std::vector<Keyframe> path;  // sorted by time; held constant outside
    std::vector<Oscillation> oscillations;
    double rcs_amp = 1.0;

    double path_range(double t) const noexcept;
    double range_at(double t) const noexcept;
};

/// Tracks are ordered torso, left arm, right arm, left leg, right leg.
struct ActivityProfile {
    int activity_id = 0;
    std::vector<ScattererTrack> tracks;
    double duration_s = 0.0;

    const ScattererTrack& torso() const { return tracks.front(); }
};

struct MultipathEcho {
    double delay_s;
    double doppler_offset_hz;
    double gain;
};

struct OcclusionWindow {
    double t_start;
    double t_end;
    double attenuation;
};

struct EnvConfig {
    std::vector<MultipathEcho> multipath_echoes;
    std::vector<OcclusionWindow> occlusion_windows;
    double clutter_gain = 0.0;
    double snr_db = std::numeric_limits<double>::infinity();  // +inf disables noise

    static EnvConfig identity() { return {}; }
    void validate(double duration_s) const;
};

struct PatchNoiseModel {
    std::vector<ImageGrid> patches;
    std::size_t tile_rows = 0;
    std::size_t tile_cols = 0;
};

/// Deterministic kinematic template for one recording.
/// subject_scale in [0.8, 1.2] multiplies every limb oscillation amplitude.
ActivityProfile activity_profile(int activity_id, double subject_scale, std::uint64_t seed);

/// Sum of rcs * exp(-j 4 pi f_c r(t) / c) over tracks. Throws if any track
/// leaves [kMinTrackRange, kMaxTrackRange] or the profile is too long.
IQSignal synthesize_return(const ActivityProfile& profile, const RadarConfig& radar);

/// Adds multipath, occlusion, clutter and complex AWGN to a clean return.
/// Noise power is referenced to the mean power of `base`.
IQSignal apply_environment(const IQSignal& base, const EnvConfig& env, std::uint64_t seed);

/// Randomised pseudo-measurement environment for a recording of `duration_s`.
EnvConfig random_environment(double duration_s, std::uint64_t seed);

/// Spectrogram -> band crop -> peak-referenced dB image -> resize.
ImageGrid render_image(const IQSignal& signal, const StftConfig& stft_cfg, const RenderConfig& render = {});

ImageGrid simulate_clean(int activity_id, double subject_scale, const RadarConfig& radar,
                         const StftConfig& stft_cfg, std::uint64_t seed, const RenderConfig& render = {});

ImageGrid simulate_measured(int activity_id, double subject_scale, const RadarConfig& radar,
                            const StftConfig& stft_cfg, const EnvConfig& env, std::uint64_t seed,
                            const RenderConfig& render = {});

/// i.i.d. N(0, sigma^2) field, row-major, deterministic in seed.
std::vector<double> gaussian_field(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed);

/// Pixel-wise AWGN at snr_db relative to the image's mean square, clamped to [0,1].
ImageGrid add_awgn_image(const ImageGrid& img, double snr_db, std::uint64_t seed);

/// Harvests tiles from low-energy (non-activity) columns of `measured_set`.
/// Throws Error("no non-activity zone found") when nothing qualifies.
PatchNoiseModel fit_patch_noise(const std::vector<ImageGrid>& measured_set, double energy_quantile,
                                std::pair<std::size_t, std::size_t> tile);

/// clamp(img + gain * Q, 0, 1) with Q tiled from randomly drawn patches.
ImageGrid apply_patch_noise(const ImageGrid& img, const PatchNoiseModel& model, double gain, std::uint64_t seed);

}  // namespace mdstyle
