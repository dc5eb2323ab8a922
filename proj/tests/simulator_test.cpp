#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "mdstyle/simulator.hpp"
#include "support.hpp"

using namespace mdstyle;

namespace {

ActivityProfile receding(double v, double r0, double duration) {
    ActivityProfile p;
    p.activity_id = 1;
    p.duration_s = duration;
    ScattererTrack t;
    t.path = {{0.0, r0}, {duration, r0 - v * duration}};
    p.tracks.push_back(t);
    return p;
}

// Mean power of each column, in dB.
std::vector<double> column_means_db(const Spectrogram& sp) {
    std::vector<double> m(sp.cols, 0.0);
    for (std::size_t r = 0; r < sp.rows; ++r)
        for (std::size_t c = 0; c < sp.cols; ++c) m[c] += std::pow(10.0, sp(r, c) / 10.0);
    for (auto& v : m) v = 10.0 * std::log10(v / static_cast<double>(sp.rows));
    return m;
}

}  // namespace

TEST_CASE("activity_profile is deterministic") {
    const auto a = activity_profile(8, 1.0, 7);
    const auto b = activity_profile(8, 1.0, 7);
    REQUIRE(a.tracks.size() == b.tracks.size());
    for (std::size_t k = 0; k < a.tracks.size(); ++k)
        for (double t = 0.0; t < a.duration_s; t += 0.01) CHECK(a.tracks[k].range_at(t) == b.tracks[k].range_at(t));
}

TEST_CASE("activity 8 torso walks between 0.8 m and 3.8 m") {
    for (std::uint64_t seed : {1u, 7u, 99u}) {
        const auto p = activity_profile(8, 1.0, seed);
        double lo = 1e9, hi = -1e9;
        for (const auto& k : p.torso().path) {
            lo = std::min(lo, k.range_m);
            hi = std::max(hi, k.range_m);
        }
        CHECK(lo == 0.8);
        CHECK(hi == 3.8);
        for (double t = 0.0; t <= p.duration_s; t += 0.01) {
            CHECK(p.torso().path_range(t) >= 0.8);
            CHECK(p.torso().path_range(t) <= 3.8);
        }
    }
}

TEST_CASE("every activity lasts 5 to 10 s and has a torso plus four limbs") {
    for (int a = 1; a <= kNumActivities; ++a)
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto p = activity_profile(a, 1.0, seed);
            CHECK(p.activity_id == a);
            CHECK(p.duration_s >= 5.0);
            CHECK(p.duration_s <= 10.0);
            CHECK(p.tracks.size() == 5);
        }
    CHECK_THROWS_AS(activity_profile(0, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(activity_profile(11, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(activity_profile(3, 1.5, 1), InvalidArgument);
}

TEST_CASE("activity 1 torso path is a single monotone segment") {
    const auto p = activity_profile(1, 1.0, 3);
    const auto& path = p.torso().path;
    REQUIRE(path.size() >= 2);
    const double dir = path.back().range_m - path.front().range_m;
    CHECK(dir != 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) CHECK((path[i].range_m - path[i - 1].range_m) * dir >= 0.0);
}

TEST_CASE("subject scale multiplies limb amplitudes exactly") {
    const auto a = activity_profile(9, 1.0, 5);
    const auto b = activity_profile(9, 1.2, 5);
    for (std::size_t k = 1; k < a.tracks.size(); ++k) {
        REQUIRE(a.tracks[k].oscillations.size() == b.tracks[k].oscillations.size());
        for (std::size_t j = 0; j < a.tracks[k].oscillations.size(); ++j)
            CHECK(b.tracks[k].oscillations[j].amplitude_m == doctest::Approx(1.2 * a.tracks[k].oscillations[j].amplitude_m).epsilon(1e-15));
    }
}

TEST_CASE("synthesize_return: Doppler ridge of a receding scatterer") {
    RadarConfig radar;
    const StftConfig cfg;
    for (double v : {0.5, 1.0, 2.0}) {
        const auto sig = synthesize_return(receding(-v, 1.0, 2.0), radar);
        CHECK(sig.samples.size() == 4000);
        const auto sp = stft(sig, cfg);
        const double expect = 2.0 * v * radar.carrier_hz / radar.c_mps;
        // approaching at v means range decreasing; receding() with -v moves away
        for (std::size_t c = 0; c < sp.cols; ++c) {
            std::size_t best = 0;
            for (std::size_t r = 0; r < sp.rows; ++r)
                if (sp(r, c) > sp(best, c)) best = r;
            CHECK(std::abs(sp.row_frequency(best) + expect) <= sp.freq_step_hz);
        }
    }
    const auto sig = synthesize_return(receding(1.0, 4.0, 2.0), radar);
    const auto sp = stft(sig, cfg);
    std::size_t best = 0;
    for (std::size_t r = 0; r < sp.rows; ++r)
        if (sp(r, 2) > sp(best, 2)) best = r;
    CHECK(std::abs(sp.row_frequency(best) - 16.49) <= sp.freq_step_hz);
}

TEST_CASE("synthesize_return: static tracks") {
    RadarConfig radar;
    const auto still = receding(0.0, 2.0, 1.0);
    const auto sp = stft(synthesize_return(still, radar), StftConfig{});
    for (std::size_t c = 0; c < sp.cols; ++c) {
        std::size_t best = 0;
        for (std::size_t r = 0; r < sp.rows; ++r)
            if (sp(r, c) > sp(best, c)) best = r;
        CHECK(sp.row_frequency(best) == 0.0);
    }

    auto two = still;
    two.tracks[0].rcs_amp = 0.3;
    two.tracks.push_back(still.tracks[0]);
    two.tracks[1].rcs_amp = 0.5;
    for (const auto& s : synthesize_return(two, radar).samples) CHECK(std::abs(s) == doctest::Approx(0.8));

    CHECK_THROWS_AS(synthesize_return(receding(1.0, 0.5, 1.0), radar), InvalidArgument);
    CHECK_THROWS_AS(synthesize_return(receding(0.0, 2.0, 11.0), radar), InvalidArgument);
}

TEST_CASE("simulate_clean: deterministic 100x100 image") {
    const RadarConfig radar;
    const StftConfig cfg;
    const auto a = simulate_clean(4, 1.1, radar, cfg, 42);
    CHECK(a.rows() == 100);
    CHECK(a.cols() == 100);
    CHECK(a == simulate_clean(4, 1.1, radar, cfg, 42));
    CHECK_FALSE(a == simulate_clean(4, 1.1, radar, cfg, 43));
}

TEST_CASE("simulate_clean: body rotation swings Doppler both ways") {
    const auto img = simulate_clean(7, 1.0, RadarConfig{}, StftConfig{}, 3);
    // image rows run from -125 Hz (row 0) to +125 Hz; measure the centroid
    // of bright pixels relative to the centre row, ignoring the torso line.
    int pos = 0, neg = 0;
    const double mid = (static_cast<double>(img.rows()) - 1) / 2;
    for (std::size_t c = 0; c < img.cols(); ++c) {
        double w = 0.0, m = 0.0;
        for (std::size_t r = 0; r < img.rows(); ++r) {
            const double off = static_cast<double>(r) - mid;
            if (std::abs(off) < 4) continue;
            const double p = std::max(0.0, img(r, c) - 0.4);
            w += p;
            m += p * off;
        }
        if (w <= 0.0) continue;
        if (m / w > 2) ++pos;
        if (m / w < -2) ++neg;
    }
    CHECK(pos > 0);
    CHECK(neg > 0);
}

TEST_CASE("simulate_measured with the identity environment equals simulate_clean") {
    const RadarConfig radar;
    const StftConfig cfg;
    for (int a : {2, 8})
        CHECK(simulate_measured(a, 0.9, radar, cfg, EnvConfig::identity(), 11) == simulate_clean(a, 0.9, radar, cfg, 11));
}

TEST_CASE("apply_environment: noise power matches the requested SNR") {
    IQSignal base;
    base.sample_rate_hz = 2000.0;
    base.samples.assign(200000, std::polar(1.0, 0.3));
    EnvConfig env;
    env.snr_db = 10.0;
    const auto out = apply_environment(base, env, 9);
    double var = 0.0;
    for (std::size_t i = 0; i < base.samples.size(); ++i) var += std::norm(out.samples[i] - base.samples[i]);
    var /= static_cast<double>(base.samples.size());
    CHECK(var == doctest::Approx(0.1).epsilon(0.02));
    CHECK(10 * std::log10(1.0 / var) == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("apply_environment: full occlusion leaves only the noise floor") {
    const RadarConfig radar;
    const StftConfig cfg;
    const auto profile = activity_profile(8, 1.0, 4);
    const auto base = synthesize_return(profile, radar);
    const double T = static_cast<double>(base.samples.size()) / radar.sample_rate_hz;
    EnvConfig env;
    env.snr_db = 10.0;
    env.occlusion_windows = {{2.0, 3.0, 1.0}};
    const auto sp = stft(apply_environment(base, env, 1), cfg);

    EnvConfig silent = env;
    silent.occlusion_windows = {{0.0, T, 1.0}};
    const auto floor_sp = stft(apply_environment(base, silent, 1), cfg);
    const auto floor_cols = column_means_db(floor_sp);
    const double floor_db = std::accumulate(floor_cols.begin(), floor_cols.end(), 0.0) / floor_cols.size();

    const auto cols = column_means_db(sp);
    int inside = 0;
    for (std::size_t c = 0; c < sp.cols; ++c) {
        const double t0 = static_cast<double>(c) * sp.time_step_s;
        const double t1 = t0 + cfg.window_len / radar.sample_rate_hz;
        if (t0 >= 2.0 && t1 <= 3.0) {
            ++inside;
            CHECK(std::abs(cols[c] - floor_db) <= 3.0);
        } else if (t1 < 2.0) {
            CHECK(cols[c] > floor_db + 3.0);
        }
    }
    CHECK(inside >= 5);
}

TEST_CASE("EnvConfig validation") {
    EnvConfig env;
    env.occlusion_windows = {{4.0, 12.0, 0.5}};
    CHECK_THROWS_AS(env.validate(10.0), InvalidArgument);
    env.occlusion_windows = {{1.0, 2.0, 1.5}};
    CHECK_THROWS_AS(env.validate(10.0), InvalidArgument);
    env.occlusion_windows.clear();
    env.multipath_echoes = {{0.01, 0.0, 2.0}};
    CHECK_THROWS_AS(env.validate(10.0), InvalidArgument);
    env.multipath_echoes.clear();
    env.clutter_gain = -1.0;
    CHECK_THROWS_AS(env.validate(10.0), InvalidArgument);
    env.clutter_gain = 0.0;
    CHECK_NOTHROW(env.validate(10.0));
    CHECK_NOTHROW(random_environment(7.0, 3).validate(7.0));
}

TEST_CASE("add_awgn_image") {
    const auto img = testing::random_image(100, 100, 2, 0.3f, 0.7f);
    CHECK(add_awgn_image(img, std::numeric_limits<double>::infinity(), 1) == img);
    CHECK(add_awgn_image(img, 10.0, 5) == add_awgn_image(img, 10.0, 5));

    // unit mean square -> pre-clamp variance 0.1
    const auto noise = gaussian_field(100, 100, std::sqrt(1.0 / std::pow(10.0, 1.0)), 17);
    double m = 0.0, v = 0.0;
    for (double x : noise) m += x;
    m /= noise.size();
    for (double x : noise) v += (x - m) * (x - m);
    v /= noise.size();
    CHECK(v == doctest::Approx(0.1).epsilon(0.05));

    // the image path uses exactly that field, scaled by its mean square
    const ImageGrid half(100, 100, 0.5f);
    const auto noisy = add_awgn_image(half, 10.0, 17);
    const auto expect = gaussian_field(100, 100, std::sqrt(0.25 / 10.0), 17);
    for (std::size_t i = 0; i < 50; ++i)
        CHECK(noisy.pixels()[i] == ImageGrid::clamp01(0.5 + expect[i]));
}

TEST_CASE("fit_patch_noise") {
    std::vector<ImageGrid> noise;
    for (std::uint64_t s = 0; s < 4; ++s) noise.push_back(testing::random_image(40, 40, s, 0.0f, 0.2f));
    const auto model = fit_patch_noise(noise, 0.9, {10, 10});
    CHECK(model.tile_rows == 10);
    CHECK(model.tile_cols == 10);
    const std::size_t positions = 4 * 4 * 4;
    CHECK(model.patches.size() >= positions / 2);
    for (const auto& p : model.patches) {
        CHECK(p.rows() == 10);
        CHECK(p.cols() == 10);
    }

    CHECK_THROWS_WITH(fit_patch_noise(noise, 0.01, {10, 10}), "no non-activity zone found");
    CHECK_THROWS_AS(fit_patch_noise(noise, 0.0, {10, 10}), InvalidArgument);
    CHECK_THROWS_AS(fit_patch_noise({}, 0.5, {10, 10}), InvalidArgument);
    CHECK_THROWS_AS(fit_patch_noise(noise, 0.5, {50, 10}), InvalidArgument);

    const auto zeros = fit_patch_noise({ImageGrid(30, 30), ImageGrid(30, 30)}, 0.5, {10, 10});
    CHECK(zeros.patches.size() == 2 * 3 * 3);
    for (const auto& p : zeros.patches)
        for (float v : p.pixels()) CHECK(v == 0.0f);
}

TEST_CASE("apply_patch_noise") {
    const auto img = testing::random_image(100, 100, 8, 0.0f, 0.8f);
    PatchNoiseModel model;
    model.tile_rows = model.tile_cols = 10;
    model.patches = {testing::random_image(10, 10, 1), testing::random_image(10, 10, 2)};
    CHECK(apply_patch_noise(img, model, 0.0, 3) == img);
    CHECK(apply_patch_noise(img, model, 0.5, 3) == apply_patch_noise(img, model, 0.5, 3));
    CHECK_FALSE(apply_patch_noise(img, model, 0.5, 3) == img);

    // each 10x10 tile of the output minus input is gain times one of the patches
    const auto out = apply_patch_noise(ImageGrid(100, 100), model, 0.5, 4);
    for (std::size_t r0 = 0; r0 < 100; r0 += 10)
        for (std::size_t c0 = 0; c0 < 100; c0 += 10) {
            bool matched = false;
            for (const auto& p : model.patches) {
                bool all = true;
                for (std::size_t r = 0; r < 10 && all; ++r)
                    for (std::size_t c = 0; c < 10 && all; ++c)
                        all = std::abs(out(r0 + r, c0 + c) - 0.5 * p(r, c)) < 1e-6;
                matched = matched || all;
            }
            CHECK(matched);
        }

    PatchNoiseModel zeros = model;
    zeros.patches = {ImageGrid(10, 10)};
    CHECK(apply_patch_noise(img, zeros, 0.7, 1) == img);
    CHECK_THROWS_AS(apply_patch_noise(img, PatchNoiseModel{}, 0.5, 1), InvalidArgument);
}
