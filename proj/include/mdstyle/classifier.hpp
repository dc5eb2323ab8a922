#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mdstyle/adam.hpp"
#include "mdstyle/image.hpp"
#include "mdstyle/layers.hpp"

namespace mdstyle {

inline constexpr std::size_t kNumClasses = 10;
inline constexpr std::size_t kClassifierInput = 100;

/// Images with class labels in [0, kNumClasses).
struct LabeledSet {
    std::vector<ImageGrid> images;
    std::vector<int> labels;

    std::size_t size() const noexcept { return images.size(); }
    void add(ImageGrid img, int label) {
        images.push_back(std::move(img));
        labels.push_back(label);
    }
};

/// Activity classifier on 100x100x1 inputs:
///
///   conv3x3(16)-ReLU-maxpool4  ->  25x25x16
///   conv3x3(32)-ReLU-maxpool2  ->  12x12x32
///   conv3x3(64)-ReLU-maxpool2  ->   6x6x64
///   dense(128)-ReLU
///   dense(10)-softmax
///
/// All parameters live in one flat vector so a single Adam state covers them.
class ClassifierModel {
public:
    struct Block {
        std::string name;
        std::size_t offset;
        std::size_t size;

        friend bool operator==(const Block&, const Block&) = default;
    };

    ClassifierModel();
    /// He-normal weights, zero biases.
    explicit ClassifierModel(std::uint64_t seed);

    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    std::span<const double> block(std::size_t i) const { return std::span(params_).subspan(blocks_[i].offset, blocks_[i].size); }

    std::vector<double> logits(const ImageGrid& img) const;
    std::vector<double> predict_proba(const ImageGrid& img) const;
    int predict(const ImageGrid& img) const;

    /// Cross-entropy of one example; accumulates dLoss/dparams into `grads`.
    double accumulate_gradient(const ImageGrid& img, int label, std::span<double> grads) const;

    friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;

private:
    struct Forward;
    Forward run_forward(const ImageGrid& img) const;

    std::vector<Block> blocks_;
    std::vector<double> params_;
};

struct TrainHyper {
    double lr = 0.001;
    std::size_t batch = 64;
    int epochs = 100;
    std::uint64_t seed = 0;
};

struct TrainResult {
    ClassifierModel model;
    std::vector<double> loss_history;  // mean cross-entropy per epoch
};

/// Mini-batch Adam training. Throws Error("class with no examples") when any
/// of the kNumClasses labels is absent.
TrainResult classifier_train(const LabeledSet& train, const TrainHyper& hyper);

struct ConfusionMatrix {
    std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};
    /// Row-normalised percentages; rows with no examples stay zero.
    std::array<std::array<double, kNumClasses>, kNumClasses> percent() const;
};

struct Evaluation {
    ConfusionMatrix confusion;
    double accuracy = 0.0;  // percent
};

Evaluation evaluate_predictions(std::span<const int> truth, std::span<const int> predicted);
Evaluation classifier_evaluate(const ClassifierModel& model, const LabeledSet& test);

/// NNCK container: magic, u32 version, u32 block count, then per block a
/// u32-length name, u32 value count and that many f32 values (little-endian).
void save_checkpoint(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_checkpoint(const std::filesystem::path& path);

}  // namespace mdstyle
