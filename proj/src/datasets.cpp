#include "mdstyle/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

namespace mdstyle {

SplitIndices split(const std::vector<int>& activity_ids, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("split fraction must be in (0,1)");
    std::map<int, std::vector<std::size_t>> by_activity;
    for (std::size_t i = 0; i < activity_ids.size(); ++i) by_activity[activity_ids[i]].push_back(i);
    SplitIndices out;
    for (auto& [a, idx] : by_activity) {
        if (idx.size() < 2)
            throw InvalidArgument("activity " + std::to_string(a) + " has fewer than 2 items and cannot be split");
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(a)));
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto n = idx.size();
        const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n))),
                                               1, n - 1);
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

DatasetBundle build_datasets(const BenchmarkConfig& cfg, std::uint64_t master_seed, const ProgressFn& progress) {
    cfg.validate();
    auto say = [&](const std::string& msg) {
        if (progress) progress(msg);
    };
    DatasetBundle b;
    b.config = cfg;
    b.master_seed = master_seed;
    const std::uint64_t item_root = derive_seed(master_seed, "item");
    for (int a = 1; a <= kNumActivities; ++a)
        for (int k = 0; k < cfg.per_activity; ++k) {
            const std::size_t i = b.activity_ids.size();
            const std::uint64_t seed = derive_seed(item_root, i);
            std::mt19937_64 rng(derive_seed(seed, "subject-scale"));
            b.activity_ids.push_back(a);
            b.item_seeds.push_back(seed);
            b.subject_scales.push_back(
                std::uniform_real_distribution<double>(cfg.subject_scale_min, cfg.subject_scale_max)(rng));
        }
    const std::size_t n = b.size();
    for (auto& v : b.images) v.resize(n);
    auto& measured = b.images[static_cast<std::size_t>(Domain::measured)];
    auto& clean = b.images[static_cast<std::size_t>(Domain::clean)];
    auto& awgn = b.images[static_cast<std::size_t>(Domain::awgn)];
    auto& patch = b.images[static_cast<std::size_t>(Domain::patch)];
    auto& styled = b.images[static_cast<std::size_t>(Domain::styled)];

    say("simulating " + std::to_string(n) + " recordings");
    for (std::size_t i = 0; i < n; ++i) {
        const int a = b.activity_ids[i];
        const double scale = b.subject_scales[i];
        const std::uint64_t seed = b.item_seeds[i];
        const double duration = activity_profile(a, scale, seed).duration_s;
        const EnvConfig env = random_environment(duration, derive_seed(seed, "environment"));
        measured[i] = simulate_measured(a, scale, cfg.radar, cfg.stft, env, seed);
        clean[i] = simulate_clean(a, scale, cfg.radar, cfg.stft, seed);
        awgn[i] = add_awgn_image(clean[i], cfg.awgn_snr_db, derive_seed(seed, "awgn"));
    }

    b.split = split(b.activity_ids, cfg.split_fraction, derive_seed(master_seed, "split"));

    std::vector<ImageGrid> train_measured;
    for (std::size_t i : b.split.train) train_measured.push_back(measured[i]);
    const PatchNoiseModel model =
        fit_patch_noise(train_measured, cfg.patch_quantile, {cfg.patch_tile_rows, cfg.patch_tile_cols});
    for (std::size_t i = 0; i < n; ++i)
        patch[i] = apply_patch_noise(clean[i], model, cfg.patch_gain, derive_seed(b.item_seeds[i], "patch"));

    std::map<int, ImageGrid> exemplar_images;
    for (int a = 1; a <= kNumActivities; ++a) {
        std::vector<std::size_t> pool;
        for (std::size_t i : b.split.train)
            if (b.activity_ids[i] == a) pool.push_back(i);
        std::mt19937_64 rng(derive_seed(derive_seed(master_seed, "exemplar"), static_cast<std::uint64_t>(a)));
        const std::size_t pick = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        b.exemplars[a] = pick;
        exemplar_images.emplace(a, measured[pick]);
    }

    const FeatureNetwork net(cfg.feature_seed);
    const StyleTransferConfig scfg = style_config(cfg, derive_seed(master_seed, "style"));
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 10 == 0) say("stylizing " + std::to_string(i) + "/" + std::to_string(n));
        StyleTransferConfig item_cfg = scfg;
        item_cfg.seed = batch_item_seed(scfg.seed, i);
        styled[i] = transfer(clean[i], exemplar_images.at(b.activity_ids[i]), net, item_cfg).output;
    }
    return b;
}

std::size_t synthetic_count(double s, std::size_t n) {
    require(s >= 0.0 && s <= 100.0, "s must lie in [0,100]");
    return static_cast<std::size_t>(std::ceil(s / 100.0 * static_cast<double>(n) - 1e-9));
}

namespace {

std::map<int, std::vector<ItemRef>> group(const std::vector<ItemRef>& xs) {
    std::map<int, std::vector<ItemRef>> g;
    for (const auto& x : xs) g[x.activity_id].push_back(x);
    return g;
}

template <typename Pick>
std::vector<ItemRef> compose(const std::vector<ItemRef>& meas_train, const std::vector<ItemRef>& synth, double s,
                             Pick pick) {
    const auto meas = group(meas_train);
    const auto syn = group(synth);
    std::vector<ItemRef> out;
    for (const auto& [a, items] : meas) {
        const std::size_t k = synthetic_count(s, items.size());
        const auto it = syn.find(a);
        const std::size_t available = it == syn.end() ? 0 : it->second.size();
        if (available < k)
            throw InvalidArgument("insufficient synthetic items for activity " + std::to_string(a) + ": need " +
                                  std::to_string(k) + ", have " + std::to_string(available));
        pick(out, items, k == 0 ? std::vector<ItemRef>{} : it->second, k);
    }
    return out;
}

}  // namespace

std::vector<ItemRef> compose_replacement(const std::vector<ItemRef>& meas_train, const std::vector<ItemRef>& synth,
                                         double s) {
    return compose(meas_train, synth, s, [](auto& out, const auto& meas, const auto& syn, std::size_t k) {
        out.insert(out.end(), meas.begin(), meas.end() - static_cast<std::ptrdiff_t>(k));
        out.insert(out.end(), syn.end() - static_cast<std::ptrdiff_t>(k), syn.end());
    });
}

std::vector<ItemRef> compose_augmentation(const std::vector<ItemRef>& meas_train, const std::vector<ItemRef>& synth,
                                          double s) {
    return compose(meas_train, synth, s, [](auto& out, const auto& meas, const auto& syn, std::size_t k) {
        out.insert(out.end(), meas.begin(), meas.end());
        out.insert(out.end(), syn.begin(), syn.begin() + static_cast<std::ptrdiff_t>(k));
    });
}

std::vector<ItemRef> refs(const DatasetBundle& b, Domain d, const std::vector<std::size_t>& indices) {
    std::vector<ItemRef> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back({d, i, b.activity_ids.at(i)});
    return out;
}

LabeledSet materialize(const DatasetBundle& b, const std::vector<ItemRef>& items) {
    LabeledSet set;
    for (const auto& r : items) set.add(b.image(r), r.activity_id - 1);
    return set;
}

namespace {

std::string item_path(Domain d, std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.sgrm", i);
    return std::string(domain_name(d)) + "/" + name;
}

}  // namespace

std::string manifest_json(const DatasetBundle& b) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["master_seed"] = b.master_seed;
    j["config"] = to_key_values(b.config);
    j["subject_scales"] = b.subject_scales;
    std::set<std::size_t> train(b.split.train.begin(), b.split.train.end());
    ordered_json ex = ordered_json::object();
    for (const auto& [a, i] : b.exemplars) ex[std::to_string(a)] = i;
    j["style_exemplars"] = ex;
    ordered_json items = ordered_json::array();
    for (Domain d : kAllDomains)
        for (std::size_t i = 0; i < b.size(); ++i)
            items.push_back({{"path", item_path(d, i)},
                             {"activity_id", b.activity_ids[i]},
                             {"domain", domain_name(d)},
                             {"seed", b.item_seeds[i]},
                             {"index", i},
                             {"split", train.contains(i) ? "train" : "test"}});
    j["items"] = std::move(items);
    return j.dump(2) + "\n";
}

void save_bundle(const DatasetBundle& b, const std::filesystem::path& dir) {
    for (Domain d : kAllDomains) {
        std::filesystem::create_directories(dir / domain_name(d));
        for (std::size_t i = 0; i < b.size(); ++i) save_sgram(b.domain(d)[i], dir / item_path(d, i));
    }
    std::ofstream f(dir / "manifest.json", std::ios::trunc);
    if (!f) throw Error("cannot write " + (dir / "manifest.json").string());
    f << manifest_json(b);
}

DatasetBundle load_bundle(const std::filesystem::path& dir) {
    std::ifstream f(dir / "manifest.json");
    if (!f) throw Error("cannot open " + (dir / "manifest.json").string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed manifest: " + std::string(e.what()));
    }
    DatasetBundle b;
    b.master_seed = j.at("master_seed").get<std::uint64_t>();
    apply_overrides(b.config, parse_key_values(j.at("config").get<std::string>()));
    b.subject_scales = j.at("subject_scales").get<std::vector<double>>();
    for (const auto& [a, i] : j.at("style_exemplars").items()) b.exemplars[std::stoi(a)] = i.get<std::size_t>();
    const std::size_t n = b.subject_scales.size();
    b.activity_ids.assign(n, 0);
    b.item_seeds.assign(n, 0);
    for (auto& v : b.images) v.resize(n);
    std::set<std::size_t> train;
    for (const auto& item : j.at("items")) {
        const auto d = parse_domain(item.at("domain").get<std::string>());
        const auto i = item.at("index").get<std::size_t>();
        if (!d || i >= n) throw Error("manifest item out of range");
        b.activity_ids[i] = item.at("activity_id").get<int>();
        b.item_seeds[i] = item.at("seed").get<std::uint64_t>();
        if (item.at("split").get<std::string>() == "train") train.insert(i);
        b.images[static_cast<std::size_t>(*d)][i] = load_sgram(dir / item.at("path").get<std::string>());
    }
    for (std::size_t i = 0; i < n; ++i) (train.contains(i) ? b.split.train : b.split.test).push_back(i);
    return b;
}

}  // namespace mdstyle
