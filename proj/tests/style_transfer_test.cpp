#include <doctest.h>

#include "mdstyle/style_transfer.hpp"
#include "gradcheck.hpp"
#include "support.hpp"

using namespace mdstyle;
using testing::random_tensor;

namespace {

Activations single_tap(std::size_t tap, Tensor t) {
    Activations a;
    a.taps[tap] = std::move(t);
    return a;
}

Tensor filled(std::size_t c, std::size_t h, std::size_t w, std::initializer_list<double> v) {
    Tensor t(c, h, w);
    std::size_t i = 0;
    for (double x : v) t[i++] = x;
    return t;
}

}  // namespace

TEST_CASE("gram by hand") {
    const auto g = gram(filled(2, 1, 2, {1, 0, 0, 2}));
    CHECK(g.n == 2);
    CHECK(g.values == std::vector<double>{1, 0, 0, 4});

    const auto z = gram(Tensor(3, 4, 4));
    for (double v : z.values) CHECK(v == 0.0);

    CHECK(gram(filled(1, 1, 2, {1, 2})).values == std::vector<double>{5});

    // symmetric and positive semi-definite: x^T G x = |F^T x|^2
    const auto t = random_tensor(6, 5, 5, 3);
    const auto r = gram(t);
    const auto x = random_tensor(1, 1, 6, 4);
    double quad = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            CHECK(r(i, j) == r(j, i));
            quad += x[i] * r(i, j) * x[j];
        }
    double direct = 0.0;
    for (std::size_t k = 0; k < 25; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < 6; ++i) s += x[i] * t[i * 25 + k];
        direct += s * s;
    }
    CHECK(quad == doctest::Approx(direct).epsilon(1e-12));
    CHECK(quad >= 0.0);
}

TEST_CASE("content loss by hand") {
    const std::vector<std::string> layer = {"conv2_1"};
    const auto same = single_tap(1, random_tensor(4, 3, 3, 1));
    const auto zero = content_loss(same, same, layer);
    CHECK(zero.value == 0.0);
    for (double v : zero.grads[1].data()) CHECK(v == 0.0);

    const auto l = content_loss(single_tap(1, filled(1, 1, 1, {3})), single_tap(1, filled(1, 1, 1, {1})), layer);
    CHECK(std::abs(l.value - 4.0) <= 1e-9);
    CHECK(std::abs(l.grads[1][0] - 4.0) <= 1e-9);

    const auto c = random_tensor(3, 4, 4, 2);
    const auto t = random_tensor(3, 4, 4, 3);
    Tensor t2 = c;
    for (std::size_t i = 0; i < t.size(); ++i) t2[i] = c[i] + 2.0 * (t[i] - c[i]);
    const double base = content_loss(single_tap(1, t), single_tap(1, c), layer).value;
    const double twice = content_loss(single_tap(1, t2), single_tap(1, c), layer).value;
    CHECK(std::abs(twice - 4.0 * base) <= 1e-9);

    CHECK_THROWS_AS(content_loss(single_tap(1, Tensor(1, 2, 2)), single_tap(1, Tensor(1, 3, 3)), layer),
                    InvalidArgument);
}

TEST_CASE("style loss by hand") {
    const std::vector<std::string> layer = {"conv1_1"};
    const std::map<std::string, double> w = {{"conv1_1", 1.0}};
    const auto f = single_tap(0, random_tensor(3, 4, 4, 5));
    CHECK(style_loss(f, f, layer, w).value == 0.0);

    // G_transfer = [[2]] from F = [sqrt 2], G_style = [[0]]
    const auto l =
        style_loss(single_tap(0, filled(1, 1, 1, {std::sqrt(2.0)})), single_tap(0, filled(1, 1, 1, {0})), layer, w);
    CHECK(std::abs(l.value - 4.0) <= 1e-9);
    // 4 W / MNO (G~ - G) F = 4 * 2 * sqrt 2
    CHECK(std::abs(l.grads[0][0] - 8.0 * std::sqrt(2.0)) <= 1e-9);

    CHECK_THROWS_AS(style_loss(f, single_tap(0, Tensor(2, 4, 4)), layer, w), InvalidArgument);
    CHECK_THROWS_AS(style_loss(f, f, layer, {}), InvalidArgument);
}

TEST_CASE("style loss tap gradient matches finite differences") {
    const std::vector<std::string> layer = {"conv1_1"};
    const std::map<std::string, double> w = {{"conv1_1", 0.7}};
    auto t = single_tap(0, random_tensor(2, 8, 8, 6));
    const auto s = single_tap(0, random_tensor(2, 8, 8, 7));
    const auto g = style_loss(t, s, layer, w).grads[0];
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double keep = t.taps[0][i];
        t.taps[0][i] = keep + h;
        const double up = style_loss(t, s, layer, w).value;
        t.taps[0][i] = keep - h;
        const double down = style_loss(t, s, layer, w).value;
        t.taps[0][i] = keep;
        worst = std::max(worst, testing::rel_err(g[i], (up - down) / (2 * h), 1e-8));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("total loss by hand") {
    const auto l = total_loss(2.0, 5.0, 0.001, 1.0);
    CHECK(std::abs(l.total - 5.002) <= 1e-9);
    CHECK(total_loss(2.0, 5.0, 0.0, 3.0).total == 15.0);
    CHECK(total_loss(2.0, 5.0, 0.25, 0.0).total == 0.5);
    CHECK_THROWS_AS(total_loss(1.0, 1.0, -1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(total_loss(1.0, 1.0, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("objective pixel gradient matches finite differences") {
    const FeatureNetwork net;
    StyleTransferConfig cfg;
    cfg.alpha = 0.3;  // keep the content term visible in the check
    for (std::uint64_t k = 0; k < 3; ++k) {
        const auto content = to_tensor(testing::random_image(16, 16, 10 + k));
        const auto style = to_tensor(testing::random_image(16, 16, 20 + k));
        const auto x = to_tensor(testing::random_image(16, 16, 30 + k, 0.1f, 0.9f));
        const StyleObjective obj(net, content, style, cfg);
        const auto e = obj.evaluate(x);
        CHECK(e.loss.total == doctest::Approx(cfg.alpha * e.loss.content + cfg.beta * e.loss.style));
        const auto r = testing::check_pixel_gradient(net, x, e.pixel_grad,
                                                     [&](const Tensor& t) { return obj.evaluate(t).loss.total; });
        CHECK(r.worst <= 1e-3);
        CHECK(r.kinks * 10 <= x.size());
    }
}

TEST_CASE("kinked coordinates agree once the step is small enough") {
    const FeatureNetwork net;
    const StyleTransferConfig cfg;
    const auto content = to_tensor(testing::random_image(16, 16, 11));
    const auto style = to_tensor(testing::random_image(16, 16, 21));
    const auto x = to_tensor(testing::random_image(16, 16, 31, 0.1f, 0.9f));
    const StyleObjective obj(net, content, style, cfg);
    const auto e = obj.evaluate(x);
    const auto loss = [&](const Tensor& t) { return obj.evaluate(t).loss.total; };
    const auto coarse = testing::check_pixel_gradient(net, x, e.pixel_grad, loss, 1e-4);
    const auto fine = testing::check_pixel_gradient(net, x, e.pixel_grad, loss, 1e-6);
    CHECK(coarse.kinks > 0);
    CHECK(fine.kinks < coarse.kinks);
    CHECK(fine.worst <= 1e-3);
}

TEST_CASE("transfer basics") {
    const FeatureNetwork net;
    const auto content = testing::random_image(32, 32, 1);
    StyleTransferConfig cfg;
    cfg.iterations = 30;
    cfg.seed = 4;

    SUBCASE("self style from a copy stays put") {
        cfg.init = InitMode::content_copy;
        const auto r = transfer(content, content, net, cfg);
        float worst = 0.0f;
        for (std::size_t i = 0; i < content.size(); ++i)
            worst = std::max(worst, std::abs(r.output.pixels()[i] - content.pixels()[i]));
        CHECK(worst <= 1e-3f);
        CHECK(r.trace.front().total == 0.0);
    }
    SUBCASE("trace and determinism") {
        const auto style = testing::random_image(32, 32, 2);
        const auto a = transfer(content, style, net, cfg);
        CHECK(a.trace.size() == 30);
        CHECK(a.trace.back().total <= a.trace.front().total);
        const auto b = transfer(content, style, net, cfg);
        CHECK(a.output == b.output);
        cfg.seed = 5;
        CHECK_FALSE(transfer(content, style, net, cfg).output == a.output);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(transfer(content, testing::random_image(32, 16, 2), net, cfg), InvalidArgument);
        cfg.iterations = 0;
        CHECK_THROWS_AS(transfer(content, content, net, cfg), InvalidArgument);
    }
    SUBCASE("defaults") {
        const StyleTransferConfig d;
        CHECK(d.iterations == 2500);
        CHECK(d.alpha / d.beta == doctest::Approx(1e-3));
        CHECK(d.init == InitMode::white_noise);
        CHECK(d.content_layers == std::vector<std::string>{"conv2_1"});
        CHECK(d.style_layers.size() == 5);
    }
}

TEST_CASE("batch_stylize") {
    const FeatureNetwork net;
    StyleTransferConfig cfg;
    cfg.iterations = 5;
    cfg.seed = 77;
    const auto exemplar = testing::random_image(32, 32, 50);
    std::vector<StyledItem> clean;
    for (std::uint64_t i = 0; i < 3; ++i) clean.push_back({7, testing::random_image(32, 32, 60 + i)});
    const auto out = batch_stylize(clean, {{7, exemplar}}, net, cfg);
    REQUIRE(out.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(out[i].activity_id == 7);
        StyleTransferConfig one = cfg;
        one.seed = batch_item_seed(cfg.seed, i);
        CHECK(out[i].image == transfer(clean[i].image, exemplar, net, one).output);
    }
    CHECK(batch_stylize({}, {}, net, cfg).empty());
    CHECK_THROWS_AS(batch_stylize(clean, {{3, exemplar}}, net, cfg), InvalidArgument);
}

TEST_CASE("normalized cross-correlation") {
    const auto a = testing::random_image(20, 20, 1);
    CHECK(normalized_cross_correlation(a, a) == doctest::Approx(1.0));
    std::vector<float> inv(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) inv[i] = 1.0f - a.pixels()[i];
    CHECK(normalized_cross_correlation(a, ImageGrid(20, 20, std::move(inv))) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(normalized_cross_correlation(a, ImageGrid(10, 20)), InvalidArgument);
}
