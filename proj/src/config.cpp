#include "mdstyle/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace mdstyle {

std::string_view scheme_name(Scheme s) noexcept {
    return s == Scheme::replacement ? "replacement" : "augmentation";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "replacement") return Scheme::replacement;
    if (name == "augmentation") return Scheme::augmentation;
    throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

void BenchmarkConfig::validate() const {
    require(per_activity >= 1, "per_activity must be >= 1");
    require(split_fraction > 0.0 && split_fraction < 1.0, "split fraction must be in (0,1)");
    for (double s : s_values) require(s >= 0.0 && s <= 100.0, "s values must lie in [0,100]");
    require(seeds >= 1, "seeds must be >= 1");
    require(subject_scale_min >= 0.8 && subject_scale_max <= 1.2 && subject_scale_min <= subject_scale_max,
            "subject scale range must lie within [0.8,1.2]");
    require(patch_quantile > 0.0 && patch_quantile < 1.0, "patch quantile must be in (0,1)");
    require(patch_tile_rows >= 1 && patch_tile_cols >= 1, "patch tile must be >= 1x1");
    require(patch_gain >= 0.0 && patch_gain <= 1.0, "patch gain must be in [0,1]");
    require(style_iterations >= 1 && epochs >= 1 && batch >= 1 && lr > 0.0, "invalid training settings");
    require(alpha > 0.0 && beta > 0.0, "alpha and beta must be positive");
    require(perplexity > 1.0 && tsne_iterations >= 1, "invalid t-SNE settings");
    radar.validate();
    stft.validate();
}

BenchmarkConfig profile_config(std::string_view name) {
    BenchmarkConfig cfg;
    if (name == "full") return cfg;
    if (name == "desk") {
        cfg.per_activity = 20;
        cfg.style_iterations = 300;
        cfg.epochs = 60;
        return cfg;
    }
    if (name == "ci") {
        cfg.per_activity = 6;
        cfg.style_iterations = 300;
        cfg.epochs = 20;
        return cfg;
    }
    throw InvalidArgument("unknown profile '" + std::string(name) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        const auto item = trim(s.substr(0, comma));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        throw InvalidArgument("bad numeric value for " + std::string(key) + ": '" + std::string(v) + "'");
    return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw InvalidArgument("bad integer value for " + std::string(key) + ": '" + std::string(v) + "'");
    return out;
}

InitMode to_init(std::string_view v) {
    if (v == "white_noise") return InitMode::white_noise;
    if (v == "content_copy") return InitMode::content_copy;
    throw InvalidArgument("unknown style init '" + std::string(v) + "'");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> kv;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw InvalidArgument("line " + std::to_string(line_no) + ": expected key=value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw InvalidArgument("line " + std::to_string(line_no) + ": empty key");
        kv[std::string(key)] = std::string(trim(line.substr(eq + 1)));
    }
    return kv;
}

std::map<std::string, std::string> load_key_values(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open config " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_key_values(ss.str());
}

void apply_overrides(BenchmarkConfig& cfg, const std::map<std::string, std::string>& kv) {
    if (const auto it = kv.find("profile"); it != kv.end()) cfg = profile_config(it->second);

    using Setter = std::function<void(std::string_view, std::string_view)>;
    const std::map<std::string, Setter, std::less<>> setters = {
        {"per_activity", [&](auto k, auto v) { cfg.per_activity = to_int<int>(k, v); }},
        {"split_fraction", [&](auto k, auto v) { cfg.split_fraction = to_double(k, v); }},
        {"s_values",
         [&](auto k, auto v) {
             cfg.s_values.clear();
             for (auto item : split_list(v)) cfg.s_values.push_back(to_double(k, item));
         }},
        {"schemes",
         [&](auto, auto v) {
             cfg.schemes.clear();
             for (auto item : split_list(v)) cfg.schemes.push_back(parse_scheme(item));
         }},
        {"domains",
         [&](auto, auto v) {
             cfg.domains.clear();
             for (auto item : split_list(v)) {
                 const auto d = parse_domain(item);
                 if (!d || *d == Domain::measured)
                     throw InvalidArgument("'" + std::string(item) + "' is not a synthetic domain");
                 cfg.domains.push_back(*d);
             }
         }},
        {"seeds", [&](auto k, auto v) { cfg.seeds = to_int<int>(k, v); }},
        {"subject_scale_min", [&](auto k, auto v) { cfg.subject_scale_min = to_double(k, v); }},
        {"subject_scale_max", [&](auto k, auto v) { cfg.subject_scale_max = to_double(k, v); }},
        {"awgn_snr_db", [&](auto k, auto v) { cfg.awgn_snr_db = to_double(k, v); }},
        {"patch_quantile", [&](auto k, auto v) { cfg.patch_quantile = to_double(k, v); }},
        {"patch_tile_rows", [&](auto k, auto v) { cfg.patch_tile_rows = to_int<std::size_t>(k, v); }},
        {"patch_tile_cols", [&](auto k, auto v) { cfg.patch_tile_cols = to_int<std::size_t>(k, v); }},
        {"patch_gain", [&](auto k, auto v) { cfg.patch_gain = to_double(k, v); }},
        {"feature_seed", [&](auto k, auto v) { cfg.feature_seed = to_int<std::uint64_t>(k, v); }},
        {"style_iterations", [&](auto k, auto v) { cfg.style_iterations = to_int<int>(k, v); }},
        {"alpha", [&](auto k, auto v) { cfg.alpha = to_double(k, v); }},
        {"beta", [&](auto k, auto v) { cfg.beta = to_double(k, v); }},
        {"style_init", [&](auto, auto v) { cfg.style_init = to_init(v); }},
        {"epochs", [&](auto k, auto v) { cfg.epochs = to_int<int>(k, v); }},
        {"batch", [&](auto k, auto v) { cfg.batch = to_int<std::size_t>(k, v); }},
        {"lr", [&](auto k, auto v) { cfg.lr = to_double(k, v); }},
        {"perplexity", [&](auto k, auto v) { cfg.perplexity = to_double(k, v); }},
        {"tsne_iterations", [&](auto k, auto v) { cfg.tsne_iterations = to_int<int>(k, v); }},
        {"carrier_hz", [&](auto k, auto v) { cfg.radar.carrier_hz = to_double(k, v); }},
        {"sample_rate_hz", [&](auto k, auto v) { cfg.radar.sample_rate_hz = to_double(k, v); }},
        {"duration_s", [&](auto k, auto v) { cfg.radar.duration_s = to_double(k, v); }},
        {"stft_window", [&](auto k, auto v) { cfg.stft.window_len = to_int<int>(k, v); }},
        {"stft_hop", [&](auto k, auto v) { cfg.stft.hop = to_int<int>(k, v); }},
        {"stft_fft", [&](auto k, auto v) { cfg.stft.fft_len = to_int<int>(k, v); }},
    };
    for (const auto& [key, value] : kv) {
        if (key == "profile") continue;
        const auto it = setters.find(key);
        if (it == setters.end()) throw InvalidArgument("unknown config key '" + key + "'");
        it->second(key, value);
    }
    cfg.validate();
}

std::string to_key_values(const BenchmarkConfig& cfg) {
    std::ostringstream os;
    auto join = [](const auto& xs, auto f) {
        std::string s;
        for (const auto& x : xs) s += (s.empty() ? "" : ",") + f(x);
        return s;
    };
    os << "per_activity=" << cfg.per_activity << '\n'
       << "split_fraction=" << fmt(cfg.split_fraction) << '\n'
       << "s_values=" << join(cfg.s_values, fmt) << '\n'
       << "schemes=" << join(cfg.schemes, [](Scheme s) { return std::string(scheme_name(s)); }) << '\n'
       << "domains=" << join(cfg.domains, [](Domain d) { return std::string(domain_name(d)); }) << '\n'
       << "seeds=" << cfg.seeds << '\n'
       << "subject_scale_min=" << fmt(cfg.subject_scale_min) << '\n'
       << "subject_scale_max=" << fmt(cfg.subject_scale_max) << '\n'
       << "awgn_snr_db=" << fmt(cfg.awgn_snr_db) << '\n'
       << "patch_quantile=" << fmt(cfg.patch_quantile) << '\n'
       << "patch_tile_rows=" << cfg.patch_tile_rows << '\n'
       << "patch_tile_cols=" << cfg.patch_tile_cols << '\n'
       << "patch_gain=" << fmt(cfg.patch_gain) << '\n'
       << "feature_seed=" << cfg.feature_seed << '\n'
       << "style_iterations=" << cfg.style_iterations << '\n'
       << "alpha=" << fmt(cfg.alpha) << '\n'
       << "beta=" << fmt(cfg.beta) << '\n'
       << "style_init=" << (cfg.style_init == InitMode::white_noise ? "white_noise" : "content_copy") << '\n'
       << "epochs=" << cfg.epochs << '\n'
       << "batch=" << cfg.batch << '\n'
       << "lr=" << fmt(cfg.lr) << '\n'
       << "perplexity=" << fmt(cfg.perplexity) << '\n'
       << "tsne_iterations=" << cfg.tsne_iterations << '\n'
       << "carrier_hz=" << fmt(cfg.radar.carrier_hz) << '\n'
       << "sample_rate_hz=" << fmt(cfg.radar.sample_rate_hz) << '\n'
       << "duration_s=" << fmt(cfg.radar.duration_s) << '\n'
       << "stft_window=" << cfg.stft.window_len << '\n'
       << "stft_hop=" << cfg.stft.hop << '\n'
       << "stft_fft=" << cfg.stft.fft_len << '\n';
    return os.str();
}

StyleTransferConfig style_config(const BenchmarkConfig& cfg, std::uint64_t seed) {
    StyleTransferConfig s;
    s.alpha = cfg.alpha;
    s.beta = cfg.beta;
    s.iterations = cfg.style_iterations;
    s.init = cfg.style_init;
    s.seed = seed;
    return s;
}

}  // namespace mdstyle
