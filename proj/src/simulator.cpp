#include "mdstyle/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace mdstyle {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<std::string_view, kNumActivities> kActivityNames = {
    "sit_down_on_chair",     "stand_up_from_chair",  "stand_up_to_walk", "walk_to_sit_down",
    "walk_to_fall",          "ground_up_to_walk",    "body_rotating",    "walking_back_and_forth",
    "punching",              "pickup_and_drop_object",
};

enum Limb { kArmL = 0, kArmR = 1, kLegL = 2, kLegR = 3 };

// Accumulates a torso path and limb oscillations for one activity template.
// Base amplitudes are drawn independently of subject_scale, then scaled.
class TemplateBuilder {
public:
    TemplateBuilder(std::uint64_t seed, double scale) : rng_(seed), scale_(scale) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    void at(double t, double r) { path_.push_back({t, r}); }

    void torso_sway(double amp, double freq, double phase, double t_on, double t_off) {
        torso_osc_.push_back({amp, freq, phase, t_on, t_off, 0.3});
    }

    void limb(Limb l, double base_amp, double freq, double phase, double t_on, double t_off, double ramp = 0.2) {
        limbs_[l].push_back({base_amp * scale_, freq, phase, t_on, t_off, ramp});
    }

    // Half-sine excursion of one limb spanning [t_on, t_on + dur].
    void burst(Limb l, double base_amp, double t_on, double dur) {
        const double f = 0.5 / dur;
        limb(l, base_amp, f, -2.0 * kPi * f * t_on, t_on, t_on + dur, 0.05);
    }

    // Gait: legs in antiphase, arms opposite to legs.
    void walk(double t_on, double t_off, double cadence_hz) {
        const double leg = uniform(0.20, 0.28);
        const double arm = uniform(0.10, 0.16);
        const double ph = uniform(0.0, 2.0 * kPi);
        limb(kLegL, leg, cadence_hz, ph, t_on, t_off);
        limb(kLegR, leg, cadence_hz, ph + kPi, t_on, t_off);
        limb(kArmL, arm, cadence_hz, ph + kPi, t_on, t_off);
        limb(kArmR, arm, cadence_hz, ph, t_on, t_off);
    }

    ActivityProfile build(int id, double duration) {
        ActivityProfile p;
        p.activity_id = id;
        p.duration_s = duration;
        ScattererTrack torso{path_, torso_osc_, 1.0};
        p.tracks.push_back(torso);
        constexpr std::array<double, 4> rcs = {0.25, 0.25, 0.35, 0.35};
        for (int l = 0; l < 4; ++l) p.tracks.push_back(ScattererTrack{path_, limbs_[l], rcs[l]});
        return p;
    }

private:
    std::mt19937_64 rng_;
    double scale_;
    std::vector<Keyframe> path_;
    std::vector<Oscillation> torso_osc_;
    std::array<std::vector<Oscillation>, 4> limbs_;
};

// Linear walk from `from` towards `to` (m) starting at t0 with speed v.
// Returns the end time.
double walk_segment(TemplateBuilder& b, double t0, double from, double to, double v) {
    const double t1 = t0 + std::abs(to - from) / v;
    b.at(t0, from);
    b.at(t1, to);
    return t1;
}

ActivityProfile build_template(int id, double s, std::uint64_t seed) {
    TemplateBuilder b(seed, s);
    switch (id) {
        case 1: {  // sit down: short move away while lowering
            const double T = b.uniform(5.0, 8.0), r0 = b.uniform(1.5, 3.0);
            const double ts = b.uniform(1.0, T - 3.0), d = b.uniform(1.0, 1.6);
            b.at(0.0, r0); b.at(ts, r0); b.at(ts + d, r0 + 0.35); b.at(T, r0 + 0.35);
            b.burst(kLegL, b.uniform(0.10, 0.16), ts, d);
            b.burst(kLegR, b.uniform(0.08, 0.14), ts + 0.1, d);
            b.burst(kArmL, b.uniform(0.05, 0.09), ts, d);
            b.burst(kArmR, b.uniform(0.05, 0.09), ts + 0.15, d);
            return b.build(id, T);
        }
        case 2: {  // stand up from chair
            const double T = b.uniform(5.0, 8.0), r0 = b.uniform(1.5, 3.0);
            const double ts = b.uniform(1.0, T - 3.0), d = b.uniform(1.0, 1.6);
            b.at(0.0, r0 + 0.35); b.at(ts, r0 + 0.35); b.at(ts + d, r0); b.at(T, r0);
            b.burst(kLegL, -b.uniform(0.10, 0.16), ts, d);
            b.burst(kLegR, -b.uniform(0.08, 0.14), ts + 0.1, d);
            b.burst(kArmL, -b.uniform(0.10, 0.16), ts - 0.1, d);
            b.burst(kArmR, -b.uniform(0.10, 0.16), ts, d);
            return b.build(id, T);
        }
        case 3: {  // stand up, then walk towards the sensor
            const double T = b.uniform(6.0, 9.0), r0 = b.uniform(3.3, 3.7);
            const double ts = b.uniform(0.5, 1.5), d = b.uniform(1.0, 1.4);
            const double tw = ts + d, walk_dur = T - tw - b.uniform(0.3, 0.8);
            const double v = std::min(b.uniform(0.8, 1.3), (r0 - 0.2 - 0.9) / walk_dur);
            b.at(0.0, r0); b.at(ts, r0);
            b.burst(kLegL, -b.uniform(0.10, 0.16), ts, d);
            b.burst(kArmR, -b.uniform(0.08, 0.14), ts, d);
            const double tend = walk_segment(b, tw, r0 - 0.2, r0 - 0.2 - v * walk_dur, v);
            b.at(T, r0 - 0.2 - v * walk_dur);
            b.walk(tw, tend, b.uniform(0.85, 1.05));
            return b.build(id, T);
        }
        case 4: {  // walk towards the chair, then sit
            const double T = b.uniform(6.0, 9.0), r0 = b.uniform(3.3, 3.7);
            const double tw0 = b.uniform(0.2, 0.6), tw1 = T - b.uniform(2.2, 3.0);
            const double v = std::min(b.uniform(0.8, 1.3), (r0 - 1.0) / (tw1 - tw0));
            const double r1 = r0 - v * (tw1 - tw0);
            const double d = b.uniform(1.0, 1.5), ts = tw1 + 0.2;
            b.at(0.0, r0);
            walk_segment(b, tw0, r0, r1, v);
            b.at(ts, r1); b.at(ts + d, r1 + 0.35); b.at(T, r1 + 0.35);
            b.walk(tw0, tw1, b.uniform(0.85, 1.05));
            b.burst(kLegL, b.uniform(0.10, 0.16), ts, d);
            b.burst(kLegR, b.uniform(0.08, 0.14), ts + 0.1, d);
            return b.build(id, T);
        }
        case 5: {  // walk, then fall forward and lie still
            const double T = b.uniform(5.0, 8.0), r0 = b.uniform(3.3, 3.7);
            const double tw0 = b.uniform(0.2, 0.6), tf = b.uniform(2.5, T - 2.0);
            const double v = std::min(b.uniform(0.8, 1.3), (r0 - 1.7) / (tf - tw0));
            const double r1 = r0 - v * (tf - tw0), df = b.uniform(0.5, 0.7);
            b.at(0.0, r0);
            walk_segment(b, tw0, r0, r1, v);
            b.at(tf + df, r1 - 0.8); b.at(T, r1 - 0.8);
            b.walk(tw0, tf, b.uniform(0.85, 1.05));
            b.burst(kArmL, -b.uniform(0.25, 0.35), tf, df);
            b.burst(kArmR, -b.uniform(0.25, 0.35), tf + 0.05, df);
            b.burst(kLegL, b.uniform(0.15, 0.22), tf, df);
            return b.build(id, T);
        }
        case 6: {  // get up from the ground, then walk away
            const double T = b.uniform(6.0, 10.0), r0 = b.uniform(1.0, 1.4);
            const double tr = b.uniform(0.3, 1.0), dr = b.uniform(2.0, 2.5);
            const double tw = tr + dr, walk_dur = T - tw - b.uniform(0.3, 0.8);
            const double v = std::min(b.uniform(0.8, 1.3), (3.7 - r0 - 0.1) / walk_dur);
            b.at(0.0, r0); b.at(tr, r0); b.at(tw, r0 + 0.1);
            const double tend = walk_segment(b, tw, r0 + 0.1, r0 + 0.1 + v * walk_dur, v);
            b.at(T, r0 + 0.1 + v * walk_dur);
            const double fr = b.uniform(0.5, 0.7);
            b.limb(kArmL, b.uniform(0.12, 0.18), fr, 0.0, tr, tw);
            b.limb(kArmR, b.uniform(0.12, 0.18), fr, kPi, tr, tw);
            b.limb(kLegL, b.uniform(0.08, 0.12), fr, kPi / 2, tr, tw);
            b.walk(tw, tend, b.uniform(0.85, 1.05));
            return b.build(id, T);
        }
        case 7: {  // rotate the body in place with extended arms
            const double T = b.uniform(5.0, 10.0), r0 = b.uniform(1.5, 3.0);
            const double f = b.uniform(0.4, 0.6), ph = b.uniform(0.0, 2.0 * kPi);
            b.at(0.0, r0); b.at(T, r0);
            b.torso_sway(b.uniform(0.15, 0.22), f, ph, 0.0, T);
            b.limb(kArmL, b.uniform(0.30, 0.40), f, ph, 0.0, T);
            b.limb(kArmR, b.uniform(0.30, 0.40), f, ph + kPi, 0.0, T);
            b.limb(kLegL, b.uniform(0.02, 0.04), f, ph, 0.0, T);
            b.limb(kLegR, b.uniform(0.02, 0.04), f, ph + kPi, 0.0, T);
            return b.build(id, T);
        }
        case 8: {  // walk back and forth between 3.8 m and 0.8 m
            const double T = b.uniform(5.0, 10.0);
            const int legs = T >= 7.5 ? 3 : 2;
            const double leg_dur = T / legs;
            for (int i = 0; i <= legs; ++i) b.at(i * leg_dur, i % 2 == 0 ? 3.8 : 0.8);
            b.walk(0.0, T, b.uniform(0.85, 1.05));
            return b.build(id, T);
        }
        case 9: {  // punching in place
            const double T = b.uniform(5.0, 9.0), r0 = b.uniform(1.2, 2.5);
            const double f = b.uniform(1.0, 1.4), t0 = b.uniform(0.3, 1.0), t1 = T - b.uniform(0.3, 1.0);
            b.at(0.0, r0); b.at(T, r0);
            b.limb(kArmL, b.uniform(0.28, 0.36), f, 0.0, t0, t1);
            b.limb(kArmR, b.uniform(0.28, 0.36), f, kPi, t0, t1);
            b.limb(kLegL, b.uniform(0.01, 0.03), f, 0.0, t0, t1);
            b.limb(kLegR, b.uniform(0.01, 0.03), f, kPi, t0, t1);
            b.torso_sway(0.03, f, 0.0, t0, t1);
            return b.build(id, T);
        }
        case 10: {  // bend to pick an object up, stand, bend again to drop it
            const double T = b.uniform(6.0, 9.0), r0 = b.uniform(1.5, 3.0);
            const double db = b.uniform(0.9, 1.2), hold = b.uniform(0.3, 0.6), pause = b.uniform(0.6, 1.2);
            double t = b.uniform(0.5, 1.0);
            b.at(0.0, r0);
            for (int k = 0; k < 2; ++k) {
                b.at(t, r0);
                b.at(t + db, r0 - 0.3);
                b.at(t + db + hold, r0 - 0.3);
                b.at(t + 2 * db + hold, r0);
                b.burst(kArmL, -b.uniform(0.20, 0.30), t, db);
                b.burst(kArmR, -b.uniform(0.20, 0.30), t + 0.05, db);
                b.burst(kArmL, b.uniform(0.15, 0.25), t + db + hold, db);
                t += 2 * db + hold + pause;
            }
            b.at(T, r0);
            return b.build(id, T);
        }
        default:
            throw InvalidArgument("invalid activity id " + std::to_string(id));
    }
}

}  // namespace

std::string_view activity_name(int activity_id) {
    require(valid_activity(activity_id), "invalid activity id");
    return kActivityNames[static_cast<std::size_t>(activity_id - 1)];
}

bool valid_activity(int activity_id) noexcept { return activity_id >= 1 && activity_id <= kNumActivities; }

void RadarConfig::validate() const {
    require(carrier_hz > 0.0 && sample_rate_hz > 0.0 && duration_s > 0.0 && c_mps > 0.0,
            "radar parameters must be positive");
    require(sample_rate_hz > 4.0 * max_expected_doppler_hz, "sample rate must exceed 4x the maximum Doppler");
}

double Oscillation::offset_at(double t) const noexcept {
    if (t < t_on || t > t_off || amplitude_m == 0.0) return 0.0;
    double env = 1.0;
    if (ramp_s > 0.0) {
        const double edge = std::min(t - t_on, t_off - t);
        if (edge < ramp_s) env = 0.5 - 0.5 * std::cos(kPi * edge / ramp_s);
    }
    return amplitude_m * env * std::sin(2.0 * kPi * freq_hz * t + phase_rad);
}

double ScattererTrack::path_range(double t) const noexcept {
    if (path.empty()) return 0.0;
    if (t <= path.front().t_s) return path.front().range_m;
    if (t >= path.back().t_s) return path.back().range_m;
    const auto it = std::upper_bound(path.begin(), path.end(), t,
                                     [](double v, const Keyframe& k) { return v < k.t_s; });
    const Keyframe& a = *(it - 1);
    const Keyframe& b = *it;
    const double dt = b.t_s - a.t_s;
    if (dt <= 0.0) return b.range_m;
    return a.range_m + (b.range_m - a.range_m) * (t - a.t_s) / dt;
}

double ScattererTrack::range_at(double t) const noexcept {
    double r = path_range(t);
    for (const auto& o : oscillations) r += o.offset_at(t);
    return r;
}

void EnvConfig::validate(double duration_s) const {
    for (const auto& e : multipath_echoes) {
        require(e.delay_s >= 0.0 && std::isfinite(e.delay_s), "echo delay must be >= 0");
        require(e.gain >= 0.0 && e.gain <= 1.0, "echo gain must be in [0,1]");
        require(std::isfinite(e.doppler_offset_hz), "echo Doppler offset must be finite");
    }
    for (const auto& w : occlusion_windows) {
        require(w.t_start >= 0.0 && w.t_end <= duration_s && w.t_start <= w.t_end,
                "occlusion window must lie inside the recording");
        require(w.attenuation >= 0.0 && w.attenuation <= 1.0, "occlusion attenuation must be in [0,1]");
    }
    require(clutter_gain >= 0.0 && std::isfinite(clutter_gain), "clutter gain must be >= 0");
    require(!std::isnan(snr_db) && snr_db != -std::numeric_limits<double>::infinity(), "invalid SNR");
}

ActivityProfile activity_profile(int activity_id, double subject_scale, std::uint64_t seed) {
    require(valid_activity(activity_id), "invalid activity id");
    require(subject_scale >= 0.8 && subject_scale <= 1.2, "subject scale must be in [0.8, 1.2]");
    return build_template(activity_id, subject_scale, derive_seed(seed, static_cast<std::uint64_t>(activity_id)));
}

IQSignal synthesize_return(const ActivityProfile& profile, const RadarConfig& radar) {
    radar.validate();
    require(!profile.tracks.empty(), "activity profile has no tracks");
    require(profile.duration_s > 0.0 && profile.duration_s <= radar.duration_s + 1e-9,
            "profile duration exceeds the radar duration budget");

    const auto n = static_cast<std::size_t>(std::lround(profile.duration_s * radar.sample_rate_hz));
    require(n >= 1, "profile too short to sample");
    const double k = -4.0 * kPi * radar.carrier_hz / radar.c_mps;

    IQSignal sig;
    sig.sample_rate_hz = radar.sample_rate_hz;
    sig.samples.assign(n, {0.0, 0.0});
    for (const auto& track : profile.tracks) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / radar.sample_rate_hz;
            const double r = track.range_at(t);
            if (!(r >= kMinTrackRange && r <= kMaxTrackRange))
                throw InvalidArgument("track range " + std::to_string(r) + " m outside bounds at t=" + std::to_string(t));
            sig.samples[i] += track.rcs_amp * std::polar(1.0, k * r);
        }
    }
    return sig;
}

IQSignal apply_environment(const IQSignal& base, const EnvConfig& env, std::uint64_t seed) {
    base.validate();
    const double fs = base.sample_rate_hz;
    const std::size_t n = base.samples.size();
    env.validate(static_cast<double>(n) / fs + 1e-9);

    IQSignal out = base;
    auto& x = out.samples;
    for (const auto& e : env.multipath_echoes) {
        const auto lag = static_cast<std::size_t>(std::lround(e.delay_s * fs));
        for (std::size_t i = lag; i < n; ++i)
            x[i] += e.gain * base.samples[i - lag] * std::polar(1.0, 2.0 * kPi * e.doppler_offset_hz * i / fs);
    }
    for (const auto& w : env.occlusion_windows) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / fs;
            if (t >= w.t_start && t < w.t_end) x[i] *= (1.0 - w.attenuation);
        }
    }

    std::mt19937_64 rng(derive_seed(seed, "environment"));
    if (env.clutter_gain > 0.0) {
        const std::complex<double> c =
            std::polar(env.clutter_gain, std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng));
        for (auto& v : x) v += c;
    }
    if (std::isfinite(env.snr_db)) {
        double p_sig = 0.0;
        for (const auto& v : base.samples) p_sig += std::norm(v);
        p_sig /= static_cast<double>(n);
        const double sigma = std::sqrt(p_sig / std::pow(10.0, env.snr_db / 10.0) / 2.0);
        if (sigma > 0.0) {
            std::normal_distribution<double> nd(0.0, sigma);
            for (auto& v : x) v += std::complex<double>(nd(rng), nd(rng));
        }
    }
    return out;
}

EnvConfig random_environment(double duration_s, std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, "random-environment"));
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    EnvConfig env;
    const int echoes = 1 + static_cast<int>(u(0.0, 3.0));
    for (int i = 0; i < echoes; ++i) env.multipath_echoes.push_back({u(0.005, 0.06), u(-12.0, 12.0), u(0.2, 0.5)});
    const int windows = static_cast<int>(u(0.0, 3.0));
    for (int i = 0; i < windows; ++i) {
        const double len = u(0.3, 1.0);
        const double t0 = u(0.0, std::max(0.0, duration_s - len));
        env.occlusion_windows.push_back({t0, std::min(duration_s, t0 + len), u(0.4, 0.9)});
    }
    env.clutter_gain = u(0.3, 1.0);
    env.snr_db = u(3.0, 12.0);
    return env;
}

ImageGrid render_image(const IQSignal& signal, const StftConfig& stft_cfg, const RenderConfig& render) {
    const Spectrogram band = crop_band(stft(signal, stft_cfg), render.band_hz);
    const double peak = *std::max_element(band.values.begin(), band.values.end());
    const double db_max = std::max(peak, kDbFloor + render.dynamic_range_db);
    const ImageGrid img = to_image(band, db_max - render.dynamic_range_db, db_max);
    return resize_bilinear(img, render.out_rows, render.out_cols);
}

ImageGrid simulate_clean(int activity_id, double subject_scale, const RadarConfig& radar,
                         const StftConfig& stft_cfg, std::uint64_t seed, const RenderConfig& render) {
    const auto profile = activity_profile(activity_id, subject_scale, seed);
    return render_image(synthesize_return(profile, radar), stft_cfg, render);
}

ImageGrid simulate_measured(int activity_id, double subject_scale, const RadarConfig& radar,
                            const StftConfig& stft_cfg, const EnvConfig& env, std::uint64_t seed,
                            const RenderConfig& render) {
    const auto profile = activity_profile(activity_id, subject_scale, seed);
    const IQSignal base = synthesize_return(profile, radar);
    return render_image(apply_environment(base, env, seed), stft_cfg, render);
}

std::vector<double> gaussian_field(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed) {
    std::vector<double> f(rows * cols, 0.0);
    if (!(sigma > 0.0)) return f;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, sigma);
    for (auto& v : f) v = nd(rng);
    return f;
}

ImageGrid add_awgn_image(const ImageGrid& img, double snr_db, std::uint64_t seed) {
    require(!std::isnan(snr_db), "SNR must not be NaN");
    if (snr_db == std::numeric_limits<double>::infinity()) return img;
    double ms = 0.0;
    for (float p : img.pixels()) ms += static_cast<double>(p) * p;
    ms /= static_cast<double>(img.size());
    const double sigma = std::sqrt(ms / std::pow(10.0, snr_db / 10.0));
    const auto noise = gaussian_field(img.rows(), img.cols(), sigma, seed);
    std::vector<float> px(img.size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = ImageGrid::clamp01(img.pixels()[i] + noise[i]);
    return ImageGrid(img.rows(), img.cols(), std::move(px));
}

PatchNoiseModel fit_patch_noise(const std::vector<ImageGrid>& measured_set, double energy_quantile,
                                std::pair<std::size_t, std::size_t> tile) {
    require(!measured_set.empty(), "patch noise needs at least one image");
    require(energy_quantile > 0.0 && energy_quantile < 1.0, "energy quantile must be in (0,1)");
    const auto [tr, tc] = tile;
    require(tr >= 1 && tc >= 1, "tile dimensions must be positive");

    PatchNoiseModel model;
    model.tile_rows = tr;
    model.tile_cols = tc;
    for (const auto& img : measured_set) {
        require(tr <= img.rows() && tc <= img.cols(), "tile does not fit inside the image");
        std::vector<double> energy(img.cols(), 0.0);
        for (std::size_t r = 0; r < img.rows(); ++r)
            for (std::size_t c = 0; c < img.cols(); ++c) energy[c] += img(r, c);
        for (auto& e : energy) e /= static_cast<double>(img.rows());

        // Columns at or below the k-th smallest energy, k = floor(q * cols).
        const auto k = static_cast<std::size_t>(std::floor(energy_quantile * static_cast<double>(img.cols())));
        if (k == 0) continue;
        std::vector<double> sorted = energy;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
        const double threshold = sorted[k - 1];

        for (std::size_t c0 = 0; c0 + tc <= img.cols(); c0 += tc) {
            double span = 0.0;
            for (std::size_t c = c0; c < c0 + tc; ++c) span += energy[c];
            if (span / static_cast<double>(tc) > threshold) continue;
            for (std::size_t r0 = 0; r0 + tr <= img.rows(); r0 += tr) {
                std::vector<float> px(tr * tc);
                for (std::size_t r = 0; r < tr; ++r)
                    for (std::size_t c = 0; c < tc; ++c) px[r * tc + c] = img(r0 + r, c0 + c);
                model.patches.emplace_back(tr, tc, std::move(px));
            }
        }
    }
    if (model.patches.empty()) throw Error("no non-activity zone found");
    return model;
}

ImageGrid apply_patch_noise(const ImageGrid& img, const PatchNoiseModel& model, double gain, std::uint64_t seed) {
    require(!model.patches.empty(), "patch noise model is empty");
    require(gain >= 0.0 && gain <= 1.0, "patch gain must be in [0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, model.patches.size() - 1);
    std::vector<float> px(img.pixels().begin(), img.pixels().end());
    for (std::size_t r0 = 0; r0 < img.rows(); r0 += model.tile_rows) {
        for (std::size_t c0 = 0; c0 < img.cols(); c0 += model.tile_cols) {
            const ImageGrid& p = model.patches[pick(rng)];
            for (std::size_t r = r0; r < std::min(img.rows(), r0 + model.tile_rows); ++r)
                for (std::size_t c = c0; c < std::min(img.cols(), c0 + model.tile_cols); ++c)
                    px[r * img.cols() + c] =
                        ImageGrid::clamp01(static_cast<double>(px[r * img.cols() + c]) + gain * p(r - r0, c - c0));
        }
    }
    return ImageGrid(img.rows(), img.cols(), std::move(px));
}

}  // namespace mdstyle
