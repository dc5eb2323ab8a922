#include <doctest.h>

#include <fstream>

#include "mdstyle/classifier.hpp"
#include "support.hpp"

using namespace mdstyle;

namespace {

// Class k = brightness decile k: uniform noise around (k + 0.5) / 10.
LabeledSet brightness_deciles(int per_class, std::uint64_t seed) {
    LabeledSet set;
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 10; ++k)
        for (int i = 0; i < per_class; ++i) {
            const float centre = (static_cast<float>(k) + 0.5f) / 10.0f;
            set.add(testing::random_image(100, 100, rng(), centre - 0.04f, centre + 0.04f), k);
        }
    return set;
}

}  // namespace

TEST_CASE("classifier layout") {
    const ClassifierModel m(1);
    std::size_t total = 0;
    for (const auto& b : m.blocks()) total += b.size;
    CHECK(total == m.params().size());
    // conv 1->16, 16->32, 32->64, dense 2304->128, 128->10
    const std::size_t expect = (16 * 9 + 16) + (32 * 16 * 9 + 32) + (64 * 32 * 9 + 64) + (128 * 2304 + 128) +
                               (10 * 128 + 10);
    CHECK(total == expect);
    CHECK(m.logits(ImageGrid(100, 100, 0.5f)).size() == kNumClasses);
    CHECK_THROWS_AS(m.logits(ImageGrid(64, 64)), InvalidArgument);

    const TrainHyper h;
    CHECK(h.lr == 0.001);
    CHECK(h.batch == 64);
    CHECK(h.epochs == 100);
}

TEST_CASE("classifier gradient matches finite differences") {
    ClassifierModel m(5);
    const auto img = testing::random_image(100, 100, 6);
    const int label = 3;
    std::vector<double> g(m.params().size(), 0.0);
    const double loss = m.accumulate_gradient(img, label, g);
    CHECK(loss == doctest::Approx(cross_entropy(m.logits(img), label)));

    auto p = m.params();
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (const auto& b : m.blocks()) {
        for (int k = 0; k < 12; ++k) {
            const std::size_t i = b.offset + std::uniform_int_distribution<std::size_t>(0, b.size - 1)(rng);
            const double keep = p[i], h = 1e-5;
            p[i] = keep + h;
            const double up = cross_entropy(m.logits(img), label);
            p[i] = keep - h;
            const double down = cross_entropy(m.logits(img), label);
            p[i] = keep;
            const double num = (up - down) / (2 * h);
            if (std::abs(num) < 1e-7 && std::abs(g[i]) < 1e-7) continue;
            worst = std::max(worst, testing::rel_err(g[i], num, 1e-6));
        }
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("classifier learns a brightness toy task") {
    const auto train = brightness_deciles(24, 1);
    TrainHyper h;
    h.epochs = 20;
    h.batch = 16;
    h.seed = 3;
    const auto r = classifier_train(train, h);
    CHECK(r.loss_history.size() == 20);
    CHECK(r.loss_history.back() <= r.loss_history.front());
    CHECK(classifier_evaluate(r.model, train).accuracy >= 95.0);
}

TEST_CASE("classifier training is deterministic") {
    const auto train = brightness_deciles(2, 9);
    TrainHyper h;
    h.epochs = 2;
    h.batch = 7;
    h.seed = 11;
    const auto a = classifier_train(train, h);
    const auto b = classifier_train(train, h);
    CHECK(a.model == b.model);
    CHECK(a.loss_history == b.loss_history);
    h.seed = 12;
    CHECK_FALSE(classifier_train(train, h).model == a.model);
}

TEST_CASE("classifier rejects a missing class") {
    auto train = brightness_deciles(1, 2);
    train.images.pop_back();
    train.labels.pop_back();
    CHECK_THROWS_WITH_AS(classifier_train(train, {}), "class with no examples", Error);
}

TEST_CASE("confusion matrix of degenerate predictors") {
    std::vector<int> truth;
    for (int k = 0; k < 10; ++k)
        for (int i = 0; i <= k; ++i) truth.push_back(k);
    const std::vector<int> threes(truth.size(), 3);
    const auto e = evaluate_predictions(truth, threes);
    const auto pct = e.confusion.percent();
    for (std::size_t r = 0; r < 10; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 10; ++c) {
            sum += pct[r][c];
            CHECK(pct[r][c] == (c == 3 ? 100.0 : 0.0));
        }
        CHECK(sum == doctest::Approx(100.0).epsilon(1e-3));
    }
    CHECK(e.accuracy == doctest::Approx(100.0 * 4 / truth.size()));

    const auto perfect = evaluate_predictions(truth, truth);
    CHECK(perfect.accuracy == 100.0);
    for (std::size_t r = 0; r < 10; ++r)
        for (std::size_t c = 0; c < 10; ++c) CHECK(perfect.confusion.percent()[r][c] == (r == c ? 100.0 : 0.0));

    CHECK_THROWS_AS(evaluate_predictions(std::vector<int>{}, std::vector<int>{}), InvalidArgument);
    CHECK_THROWS_AS(classifier_evaluate(ClassifierModel(1), LabeledSet{}), InvalidArgument);
}

TEST_CASE("NNCK checkpoint round trip") {
    testing::TempDir dir("nnck");
    const ClassifierModel m(42);
    save_checkpoint(m, dir.path() / "m.nnck");
    const auto back = load_checkpoint(dir.path() / "m.nnck");
    REQUIRE(back.params().size() == m.params().size());
    for (std::size_t i = 0; i < m.params().size(); ++i)
        CHECK(back.params()[i] == static_cast<double>(static_cast<float>(m.params()[i])));
    // a second pass through the f32 container is exact
    save_checkpoint(back, dir.path() / "n.nnck");
    CHECK(load_checkpoint(dir.path() / "n.nnck") == back);

    {
        std::ofstream f(dir.path() / "bad.nnck", std::ios::binary);
        f << "XXXX0000";
    }
    CHECK_THROWS_WITH_AS(load_checkpoint(dir.path() / "bad.nnck"), "bad magic", Error);
    const auto full = std::filesystem::file_size(dir.path() / "m.nnck");
    std::filesystem::copy_file(dir.path() / "m.nnck", dir.path() / "short.nnck");
    std::filesystem::resize_file(dir.path() / "short.nnck", full / 2);
    CHECK_THROWS_AS(load_checkpoint(dir.path() / "short.nnck"), Error);
}
