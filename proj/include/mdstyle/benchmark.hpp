#pragma once

#include <cstdint>
#include <vector>

#include "mdstyle/classifier.hpp"
#include "mdstyle/datasets.hpp"

namespace mdstyle {

/// Case 1 trains on measured data only; cases 2-5 mix in styled, clean,
/// awgn and patch data respectively.
Domain case_domain(int case_id);
int case_for_domain(Domain d);

struct CaseReport {
    int case_id = 1;
    Scheme scheme = Scheme::replacement;
    Domain domain = Domain::measured;
    double s = 0.0;
    int seed_index = 0;
    std::size_t train_size = 0;
    Evaluation eval;
    std::vector<double> loss_history;
};

/// Classifier seed for the i-th repetition; shared by every case so that
/// cases differ only in their training data.
std::uint64_t repetition_seed(std::uint64_t master_seed, int seed_index);

/// Training composition for a case. Throws if it would touch a test item.
std::vector<ItemRef> case_training_items(int case_id, const DatasetBundle& b, Scheme scheme, double s);

/// Trains on the case's composition and evaluates on the measured test split.
CaseReport run_case(int case_id, const DatasetBundle& b, Scheme scheme, double s, int seed_index);

/// Every scheme x domain x s x seed from the bundle's config. Case 1 is
/// trained once per seed and reported as the s = 0 point of every curve.
std::vector<CaseReport> sweep(const DatasetBundle& b, const ProgressFn& progress = {});

struct RealismReport {
    std::vector<EmbeddedImage> embeddings;
    EmbeddingCloud cloud;
    DistanceTable table;
};

/// SURF embeddings of every image in every domain, per-activity t-SNE and
/// the centroid-distance table.
RealismReport analyze_realism(const DatasetBundle& b, const ProgressFn& progress = {});

}  // namespace mdstyle
