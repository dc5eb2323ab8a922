#include "mdstyle/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

namespace mdstyle {

namespace {

constexpr std::array<std::size_t, 3> kConvChannels = {16, 32, 64};
constexpr std::array<std::size_t, 3> kPool = {4, 2, 2};
constexpr std::size_t kHidden = 128;

constexpr std::size_t flat_features() {
    std::size_t s = kClassifierInput;
    for (auto p : kPool) s /= p;
    return s * s * kConvChannels.back();
}

enum BlockId { kC1W, kC1B, kC2W, kC2B, kC3W, kC3B, kD1W, kD1B, kD2W, kD2B };

}  // namespace

struct ClassifierModel::Forward {
    Tensor input;
    std::array<Tensor, 3> conv;  // post-ReLU
    std::array<MaxPoolResult, 3> pool;
    std::vector<double> hidden;  // post-ReLU
    std::vector<double> logits;
};

ClassifierModel::ClassifierModel() {
    std::size_t offset = 0;
    auto add = [&](std::string name, std::size_t n) {
        blocks_.push_back({std::move(name), offset, n});
        offset += n;
    };
    std::size_t in = 1;
    for (std::size_t i = 0; i < 3; ++i) {
        add("conv" + std::to_string(i + 1) + ".weight", kConvChannels[i] * in * 9);
        add("conv" + std::to_string(i + 1) + ".bias", kConvChannels[i]);
        in = kConvChannels[i];
    }
    add("dense1.weight", kHidden * flat_features());
    add("dense1.bias", kHidden);
    add("dense2.weight", kNumClasses * kHidden);
    add("dense2.bias", kNumClasses);
    params_.assign(offset, 0.0);
}

ClassifierModel::ClassifierModel(std::uint64_t seed) : ClassifierModel() {
    std::mt19937_64 rng(derive_seed(seed, "classifier-init"));
    const std::array<std::size_t, 5> fan_in = {9, kConvChannels[0] * 9, kConvChannels[1] * 9, flat_features(), kHidden};
    for (std::size_t l = 0; l < 5; ++l) {
        const Block& w = blocks_[2 * l];
        std::normal_distribution<double> nd(0.0, std::sqrt(2.0 / static_cast<double>(fan_in[l])));
        for (std::size_t i = 0; i < w.size; ++i) params_[w.offset + i] = nd(rng);
    }
}

ClassifierModel::Forward ClassifierModel::run_forward(const ImageGrid& img) const {
    if (img.rows() != kClassifierInput || img.cols() != kClassifierInput)
        throw InvalidArgument("classifier input must be 100x100");
    Forward f;
    f.input = to_tensor(img);
    const Tensor* x = &f.input;
    for (std::size_t i = 0; i < 3; ++i) {
        f.conv[i] = conv_forward(*x, block(2 * i), block(2 * i + 1), kConvChannels[i]);
        relu_inplace(f.conv[i]);
        f.pool[i] = max_pool_forward(f.conv[i], kPool[i]);
        x = &f.pool[i].output;
    }
    f.hidden = dense_forward(x->data(), block(kD1W), block(kD1B), kHidden);
    for (auto& h : f.hidden) h = std::max(h, 0.0);
    f.logits = dense_forward(f.hidden, block(kD2W), block(kD2B), kNumClasses);
    return f;
}

std::vector<double> ClassifierModel::logits(const ImageGrid& img) const { return run_forward(img).logits; }

std::vector<double> ClassifierModel::predict_proba(const ImageGrid& img) const { return softmax(logits(img)); }

int ClassifierModel::predict(const ImageGrid& img) const {
    const auto l = logits(img);
    return static_cast<int>(std::max_element(l.begin(), l.end()) - l.begin());
}

double ClassifierModel::accumulate_gradient(const ImageGrid& img, int label, std::span<double> grads) const {
    require(label >= 0 && static_cast<std::size_t>(label) < kNumClasses, "label out of range");
    require(grads.size() == params_.size(), "gradient buffer size mismatch");
    const Forward f = run_forward(img);
    const double loss = cross_entropy(f.logits, static_cast<std::size_t>(label));

    auto gblock = [&](BlockId id) { return grads.subspan(blocks_[id].offset, blocks_[id].size); };

    std::vector<double> g_logits = softmax(f.logits);
    g_logits[static_cast<std::size_t>(label)] -= 1.0;

    std::vector<double> g_hidden(kHidden, 0.0);
    dense_backward(f.hidden, block(kD2W), kNumClasses, g_logits, g_hidden, gblock(kD2W), gblock(kD2B));
    for (std::size_t i = 0; i < kHidden; ++i)
        if (!(f.hidden[i] > 0.0)) g_hidden[i] = 0.0;

    Tensor g_pool(f.pool[2].output.shape());
    dense_backward(f.pool[2].output.data(), block(kD1W), kHidden, g_hidden, g_pool.data(), gblock(kD1W), gblock(kD1B));

    for (std::size_t i = 3; i-- > 0;) {
        Tensor g_conv = max_pool_backward(f.conv[i].shape(), f.pool[i], g_pool);
        relu_backward_inplace(f.conv[i], g_conv);
        const Tensor& in = i == 0 ? f.input : f.pool[i - 1].output;
        const auto wid = static_cast<BlockId>(2 * i);
        const auto bid = static_cast<BlockId>(2 * i + 1);
        conv_backward(in, block(wid), kConvChannels[i], g_conv, i == 0 ? nullptr : &g_pool, gblock(wid), gblock(bid));
    }
    return loss;
}

TrainResult classifier_train(const LabeledSet& train, const TrainHyper& hyper) {
    require(train.images.size() == train.labels.size(), "image/label count mismatch");
    require(hyper.batch >= 1 && hyper.epochs >= 1 && hyper.lr >= 0.0, "invalid training hyperparameters");
    std::array<std::size_t, kNumClasses> per_class{};
    for (int l : train.labels) {
        require(l >= 0 && static_cast<std::size_t>(l) < kNumClasses, "label out of range");
        ++per_class[static_cast<std::size_t>(l)];
    }
    for (std::size_t c = 0; c < kNumClasses; ++c)
        if (per_class[c] == 0) throw Error("class with no examples");

    TrainResult result{ClassifierModel(hyper.seed), {}};
    ClassifierModel& model = result.model;
    AdamState adam(model.params().size(), hyper.lr);
    std::vector<double> grads(model.params().size());
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::mt19937_64 rng(derive_seed(derive_seed(hyper.seed, "shuffle"), static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += hyper.batch) {
            const std::size_t end = std::min(order.size(), start + hyper.batch);
            std::fill(grads.begin(), grads.end(), 0.0);
            for (std::size_t i = start; i < end; ++i)
                epoch_loss += model.accumulate_gradient(train.images[order[i]], train.labels[order[i]], grads);
            const double inv = 1.0 / static_cast<double>(end - start);
            for (auto& g : grads) g *= inv;
            adam.step(model.params(), grads);
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    return result;
}

std::array<std::array<double, kNumClasses>, kNumClasses> ConfusionMatrix::percent() const {
    std::array<std::array<double, kNumClasses>, kNumClasses> p{};
    for (std::size_t r = 0; r < kNumClasses; ++r) {
        const std::size_t total = std::accumulate(counts[r].begin(), counts[r].end(), std::size_t{0});
        if (total == 0) continue;
        for (std::size_t c = 0; c < kNumClasses; ++c)
            p[r][c] = 100.0 * static_cast<double>(counts[r][c]) / static_cast<double>(total);
    }
    return p;
}

Evaluation evaluate_predictions(std::span<const int> truth, std::span<const int> predicted) {
    require(!truth.empty(), "evaluation set is empty");
    require(truth.size() == predicted.size(), "prediction count mismatch");
    Evaluation e;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        require(truth[i] >= 0 && truth[i] < static_cast<int>(kNumClasses), "label out of range");
        require(predicted[i] >= 0 && predicted[i] < static_cast<int>(kNumClasses), "prediction out of range");
        ++e.confusion.counts[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
        if (truth[i] == predicted[i]) ++correct;
    }
    e.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
    return e;
}

Evaluation classifier_evaluate(const ClassifierModel& model, const LabeledSet& test) {
    require(test.size() > 0, "evaluation set is empty");
    std::vector<int> predicted(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) predicted[i] = model.predict(test.images[i]);
    return evaluate_predictions(test.labels, predicted);
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw Error("truncated checkpoint");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void save_checkpoint(const ClassifierModel& model, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os.write("NNCK", 4);
    put_u32(os, 1);
    put_u32(os, static_cast<std::uint32_t>(model.blocks().size()));
    for (std::size_t i = 0; i < model.blocks().size(); ++i) {
        const auto& b = model.blocks()[i];
        put_u32(os, static_cast<std::uint32_t>(b.name.size()));
        os.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
        put_u32(os, static_cast<std::uint32_t>(b.size));
        for (double v : model.block(i)) put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    if (!os) throw Error("write failed: " + path.string());
}

ClassifierModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "NNCK", 4) != 0) throw Error("bad magic");
    if (get_u32(is) != 1) throw Error("unsupported checkpoint version");
    ClassifierModel model;
    const std::uint32_t n = get_u32(is);
    if (n != model.blocks().size()) throw Error("checkpoint block count mismatch");
    auto params = model.params();
    for (const auto& b : model.blocks()) {
        std::string name(get_u32(is), '\0');
        if (!is.read(name.data(), static_cast<std::streamsize>(name.size()))) throw Error("truncated checkpoint");
        if (name != b.name) throw Error("unexpected checkpoint block '" + name + "'");
        if (get_u32(is) != b.size) throw Error("checkpoint block size mismatch for " + name);
        for (std::size_t i = 0; i < b.size; ++i) params[b.offset + i] = std::bit_cast<float>(get_u32(is));
    }
    return model;
}

}  // namespace mdstyle
