#include <malloc.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdstyle/benchmark.hpp"
#include "mdstyle/report.hpp"

namespace fs = std::filesystem;
using namespace mdstyle;

namespace {

struct Common {
    std::uint64_t seed = 1;
    bool ci_profile = false;
    std::string profile;
    std::string config_file;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Master seed");
    cmd->add_flag("--ci-profile", c.ci_profile, "Reduced counts and iterations");
    cmd->add_option("--profile", c.profile, "full, desk or ci");
    cmd->add_option("--config", c.config_file, "key=value config file");
    cmd->add_option("--set", c.sets, "Override one config key (key=value)");
}

BenchmarkConfig resolve_config(const Common& c) {
    std::map<std::string, std::string> kv;
    if (!c.config_file.empty()) kv = load_key_values(c.config_file);
    if (!c.profile.empty()) kv["profile"] = c.profile;
    if (c.ci_profile) kv["profile"] = "ci";
    for (const auto& s : c.sets)
        for (const auto& [k, v] : parse_key_values(s)) kv[k] = v;
    BenchmarkConfig cfg;
    apply_overrides(cfg, kv);
    return cfg;
}

void progress_log(const std::string& msg) { std::cerr << msg << '\n'; }

DatasetBundle obtain_bundle(const Common& c, const std::string& bundle_dir) {
    if (!bundle_dir.empty()) return load_bundle(bundle_dir);
    return build_datasets(resolve_config(c), c.seed, progress_log);
}

}  // namespace

int main(int argc, char** argv) {
    // Tensors are allocated and freed per layer; keep them off mmap.
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);

    CLI::App app{"Micro-Doppler style transfer toolkit"};
    app.require_subcommand(1);

    Common sim_c;
    std::string sim_out = "bundle";
    auto* sim = app.add_subcommand("simulate", "Generate the five-domain dataset bundle");
    add_common(sim, sim_c);
    sim->add_option("--out", sim_out, "Output directory");

    Common sty_c;
    std::vector<std::string> contents;
    std::string style_path, out_path, out_dir, trace_path, init = "white_noise";
    double ratio = 1e-3;
    int iters = -1;
    auto* sty = app.add_subcommand("stylize", "Transfer the texture of a style image onto content images");
    add_common(sty, sty_c);
    sty->add_option("--content", contents, "Content SGRM (repeat for a batch)")->required();
    sty->add_option("--style", style_path, "Style SGRM")->required();
    sty->add_option("--alpha-beta-ratio", ratio, "alpha/beta with beta = 1");
    sty->add_option("--iters", iters, "Iterations (default from profile)");
    sty->add_option("--init", init, "white_noise or content_copy");
    sty->add_option("--out", out_path, "Output SGRM (single content)");
    sty->add_option("--out-dir", out_dir, "Output directory (batch)");
    sty->add_option("--trace", trace_path, "Loss trace CSV (single content)");

    Common emb_c;
    std::string emb_bundle, emb_out = "realism";
    auto* emb = app.add_subcommand("embed", "SURF embeddings, per-activity t-SNE and centroid distances");
    add_common(emb, emb_c);
    emb->add_option("--bundle", emb_bundle, "Bundle directory (built from config when omitted)");
    emb->add_option("--out", emb_out, "Output directory");

    Common ben_c;
    std::string ben_bundle, ben_out = "benchmark", scheme_arg = "replacement";
    int case_id = 0, seed_index = 0;
    double s_arg = 0.0;
    auto* ben = app.add_subcommand("benchmark", "Train and evaluate the classifier cases");
    add_common(ben, ben_c);
    ben->add_option("--bundle", ben_bundle, "Bundle directory (built from config when omitted)");
    ben->add_option("--out", ben_out, "Output directory");
    ben->add_option("--case", case_id, "Run a single case (1-5) instead of the full sweep");
    ben->add_option("--scheme", scheme_arg, "replacement or augmentation (single case)");
    ben->add_option("--s", s_arg, "Synthetic percentage (single case)");
    ben->add_option("--repetition", seed_index, "Repetition index (single case)");

    Common rep_c;
    std::vector<std::string> rep_inputs;
    std::string rep_out = "report", rep_bundle;
    auto* rep = app.add_subcommand("report", "Merge curve CSVs and draw figure rasters");
    add_common(rep, rep_c);
    rep->add_option("--curves", rep_inputs, "curves.csv files to merge")->required();
    rep->add_option("--bundle", rep_bundle, "Bundle directory for an example montage");
    rep->add_option("--out", rep_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            const auto b = build_datasets(resolve_config(sim_c), sim_c.seed, progress_log);
            save_bundle(b, sim_out);
            std::cout << "wrote " << b.size() << " items per domain to " << sim_out << '\n';
        } else if (*sty) {
            const auto cfg = resolve_config(sty_c);
            StyleTransferConfig scfg = style_config(cfg, sty_c.seed);
            scfg.alpha = ratio * scfg.beta;
            if (iters > 0) scfg.iterations = iters;
            if (init == "content_copy") scfg.init = InitMode::content_copy;
            else if (init != "white_noise") throw InvalidArgument("unknown init '" + init + "'");
            const FeatureNetwork net(cfg.feature_seed);
            const ImageGrid style = load_sgram(style_path);
            if (contents.size() == 1 && out_dir.empty()) {
                if (out_path.empty()) throw InvalidArgument("--out is required for a single content image");
                const auto r = transfer(load_sgram(contents[0]), style, net, scfg);
                save_sgram(r.output, out_path);
                if (!trace_path.empty()) {
                    std::string csv = "iter,content,style,total\n";
                    char line[128];
                    for (std::size_t i = 0; i < r.trace.size(); ++i) {
                        std::snprintf(line, sizeof line, "%zu,%.10g,%.10g,%.10g\n", i, r.trace[i].content,
                                      r.trace[i].style, r.trace[i].total);
                        csv += line;
                    }
                    write_text(trace_path, csv);
                }
            } else {
                if (out_dir.empty()) throw InvalidArgument("--out-dir is required for a batch");
                fs::create_directories(out_dir);
                for (std::size_t i = 0; i < contents.size(); ++i) {
                    StyleTransferConfig item = scfg;
                    item.seed = batch_item_seed(scfg.seed, i);
                    const auto r = transfer(load_sgram(contents[i]), style, net, item);
                    save_sgram(r.output, fs::path(out_dir) / fs::path(contents[i]).filename());
                    progress_log("stylized " + contents[i]);
                }
            }
        } else if (*emb) {
            const auto b = obtain_bundle(emb_c, emb_bundle);
            const auto r = analyze_realism(b, progress_log);
            write_realism_reports(r, emb_out);
            std::cout << distance_table_csv(r.table);
        } else if (*ben) {
            const auto b = obtain_bundle(ben_c, ben_bundle);
            std::vector<CaseReport> reports;
            if (case_id != 0) reports.push_back(run_case(case_id, b, parse_scheme(scheme_arg), s_arg, seed_index));
            else reports = sweep(b, progress_log);
            write_benchmark_reports(reports, ben_out);
            std::cout << curves_csv(reports);
        } else if (*rep) {
            std::vector<std::string> texts;
            for (const auto& p : rep_inputs) texts.push_back(read_text(p));
            const std::string merged = merge_curve_csvs(texts);
            fs::create_directories(rep_out);
            write_text(fs::path(rep_out) / "curves.csv", merged);
            write_pgm(curves_raster(parse_curves_csv(merged)), fs::path(rep_out) / "curves.pgm");
            if (!rep_bundle.empty()) {
                const auto b = load_bundle(rep_bundle);
                const std::size_t R = b.domain(Domain::measured)[0].rows(), C = b.domain(Domain::measured)[0].cols();
                const std::size_t W = C * kNumActivities;
                for (Domain d : kAllDomains) {
                    std::vector<float> px(R * W, 0.0f);
                    for (int a = 1; a <= kNumActivities; ++a) {
                        std::size_t i = 0;
                        while (b.activity_ids[i] != a) ++i;
                        const auto& img = b.domain(d)[i];
                        for (std::size_t r = 0; r < R; ++r)
                            for (std::size_t c = 0; c < C; ++c)
                                px[r * W + static_cast<std::size_t>(a - 1) * C + c] = img(r, c);
                    }
                    write_pgm(ImageGrid(R, W, std::move(px)),
                              fs::path(rep_out) / ("montage_" + std::string(domain_name(d)) + ".pgm"));
                }
            }
            std::cout << merged;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
