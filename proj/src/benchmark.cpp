#include "mdstyle/benchmark.hpp"

#include <set>
#include <string>

namespace mdstyle {

Domain case_domain(int case_id) {
    switch (case_id) {
        case 1: return Domain::measured;
        case 2: return Domain::styled;
        case 3: return Domain::clean;
        case 4: return Domain::awgn;
        case 5: return Domain::patch;
    }
    throw InvalidArgument("case id must be in 1..5");
}

int case_for_domain(Domain d) {
    for (int c = 1; c <= 5; ++c)
        if (case_domain(c) == d) return c;
    return 1;
}

std::uint64_t repetition_seed(std::uint64_t master_seed, int seed_index) {
    return derive_seed(derive_seed(master_seed, "repetition"), static_cast<std::uint64_t>(seed_index));
}

std::vector<ItemRef> case_training_items(int case_id, const DatasetBundle& b, Scheme scheme, double s) {
    const Domain d = case_domain(case_id);
    const auto meas_train = refs(b, Domain::measured, b.split.train);
    std::vector<ItemRef> items;
    if (case_id == 1) {
        items = meas_train;
    } else {
        // Synthetic counterparts of the measured training items only: the
        // kinematics behind a test recording never reach training.
        const auto synth = refs(b, d, b.split.train);
        items = scheme == Scheme::replacement ? compose_replacement(meas_train, synth, s)
                                              : compose_augmentation(meas_train, synth, s);
    }
    const std::set<std::size_t> test(b.split.test.begin(), b.split.test.end());
    for (const auto& r : items)
        if (test.contains(r.index)) throw Error("training composition touches test item " + std::to_string(r.index));
    return items;
}

CaseReport run_case(int case_id, const DatasetBundle& b, Scheme scheme, double s, int seed_index) {
    const auto items = case_training_items(case_id, b, scheme, s);
    const LabeledSet train = materialize(b, items);
    const LabeledSet test = materialize(b, refs(b, Domain::measured, b.split.test));

    TrainHyper hyper;
    hyper.lr = b.config.lr;
    hyper.batch = b.config.batch;
    hyper.epochs = b.config.epochs;
    hyper.seed = repetition_seed(b.master_seed, seed_index);
    TrainResult trained = classifier_train(train, hyper);

    CaseReport r;
    r.case_id = case_id;
    r.scheme = scheme;
    r.domain = case_domain(case_id);
    r.s = case_id == 1 ? 0.0 : s;
    r.seed_index = seed_index;
    r.train_size = train.size();
    r.eval = classifier_evaluate(trained.model, test);
    r.loss_history = std::move(trained.loss_history);
    return r;
}

std::vector<CaseReport> sweep(const DatasetBundle& b, const ProgressFn& progress) {
    const auto& cfg = b.config;
    std::vector<CaseReport> out;
    for (int seed = 0; seed < cfg.seeds; ++seed) {
        if (progress) progress("seed " + std::to_string(seed) + ": case 1");
        const CaseReport base = run_case(1, b, Scheme::replacement, 0.0, seed);
        for (Scheme scheme : cfg.schemes)
            for (Domain d : cfg.domains)
                for (double s : cfg.s_values) {
                    if (s == 0.0) {
                        CaseReport r = base;
                        r.case_id = case_for_domain(d);
                        r.scheme = scheme;
                        r.domain = d;
                        out.push_back(std::move(r));
                        continue;
                    }
                    if (progress)
                        progress("seed " + std::to_string(seed) + ": " + std::string(scheme_name(scheme)) + " " +
                                 std::string(domain_name(d)) + " s=" + std::to_string(static_cast<int>(s)));
                    out.push_back(run_case(case_for_domain(d), b, scheme, s, seed));
                }
    }
    return out;
}

RealismReport analyze_realism(const DatasetBundle& b, const ProgressFn& progress) {
    RealismReport r;
    for (Domain d : kAllDomains) {
        if (progress) progress("embedding " + std::string(domain_name(d)));
        for (std::size_t i = 0; i < b.size(); ++i)
            r.embeddings.push_back({b.activity_ids[i], d, image_embedding(b.domain(d)[i])});
    }
    TsneConfig t;
    t.perplexity = b.config.perplexity;
    t.iterations = b.config.tsne_iterations;
    t.seed = derive_seed(b.master_seed, "tsne");
    if (progress) progress("t-SNE per activity");
    r.cloud = embed_per_activity(r.embeddings, t);
    r.table = centroid_distance_table(r.cloud);
    return r;
}

}  // namespace mdstyle
