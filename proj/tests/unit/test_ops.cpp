#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace sketchnet;
using namespace sketchnet::testing;

TEST_CASE("tensor rejects inconsistent shapes")
{
    CHECK_THROWS_AS(TensorF(Shape{0, 2, 2}), DimensionError);
    CHECK_THROWS_AS(TensorF(Shape{1, 2, 2}, std::vector<float>(3)), DimensionError);
    TensorF t(Shape{2, 3, 4});
    CHECK(t.size() == 24);
    t(1, 2, 3) = 5.0f;
    CHECK(t.data()[23] == 5.0f);
}

TEST_CASE("conv2d_valid: all-ones 3x3 sums to 9")
{
    TensorD x(Shape{1, 3, 3}, 1.0);
    ConvParams<double> p(1, 1, 3, 3, std::vector<double>(9, 1.0), {0.0});
    const auto y = conv2d_valid(x, p);
    CHECK(y.shape() == Shape{1, 1, 1});
    CHECK(y(0, 0, 0) == 9.0);
}

TEST_CASE("conv2d_valid: 1x1 identity kernel")
{
    std::mt19937_64 rng(1);
    const auto x = random_tensor<double>(Shape{1, 5, 7}, rng);
    ConvParams<double> p(1, 1, 1, 1, {1.0}, {0.0});
    CHECK(conv2d_valid(x, p) == x);
}

TEST_CASE("conv2d_valid: 2x7x6 input, three 3x3 kernels, matches the loop oracle")
{
    std::mt19937_64 rng(2);
    const auto x = random_tensor<double>(Shape{2, 7, 6}, rng);
    const auto p = random_params<double>(3, 2, 3, 3, rng);
    const auto fast = conv2d_valid(x, p);
    const auto slow = naive_conv(x, p);
    REQUIRE(fast.shape() == Shape{3, 5, 4});
    for (std::size_t n = 0; n < fast.size(); ++n) CHECK(std::abs(fast.data()[n] - slow.data()[n]) < 1e-10);
}

TEST_CASE("conv2d_valid: dimension errors name both shapes")
{
    TensorF x(Shape{2, 5, 5});
    ConvParams<float> wrong_channels(1, 3, 3, 3);
    try {
        (void)conv2d_valid(x, wrong_channels);
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2x5x5") != std::string::npos);
        CHECK(msg.find("1x3x3x3") != std::string::npos);
    }
    CHECK_THROWS_AS(conv2d_valid(TensorF(Shape{1, 2, 5}), ConvParams<float>(1, 1, 3, 3)), DimensionError);
    CHECK_THROWS_AS(ConvParams<float>(1, 1, 2, 3), DimensionError);
    CHECK_THROWS_AS(ConvParams<float>(2, 1, 3, 3, std::vector<float>(18), {0.0f}), DimensionError);
}

TEST_CASE("conv2d_valid properties: shape law, linearity, oracle equivalence")
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    std::uniform_int_distribution<std::size_t> half(0, 3);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t c = dim(rng);
        const std::size_t k = dim(rng);
        const std::size_t kh = 2 * half(rng) + 1;
        const std::size_t kw = 2 * half(rng) + 1;
        const std::size_t h = std::max(kh, dim(rng));
        const std::size_t w = std::max(kw, dim(rng));
        const auto x = random_tensor<double>(Shape{c, h, w}, rng);
        auto p = random_params<double>(k, c, kh, kw, rng);

        const auto fast = conv2d_valid(x, p);
        CHECK(fast.shape() == Shape{k, h - kh + 1, w - kw + 1});
        const auto slow = naive_conv(x, p);
        for (std::size_t n = 0; n < fast.size(); ++n) REQUIRE(std::abs(fast.data()[n] - slow.data()[n]) < 1e-10);

        for (auto& b : p.bias()) b = 0.0;
        const auto y = random_tensor<double>(Shape{c, h, w}, rng);
        const double a = coef(rng);
        const double b = coef(rng);
        TensorD mix(x.shape());
        for (std::size_t n = 0; n < mix.size(); ++n) mix.data()[n] = a * x.data()[n] + b * y.data()[n];
        const auto lhs = conv2d_valid(mix, p);
        const auto cx = conv2d_valid(x, p);
        const auto cy = conv2d_valid(y, p);
        for (std::size_t n = 0; n < lhs.size(); ++n) {
            const double rhs = a * cx.data()[n] + b * cy.data()[n];
            REQUIRE(relative_error(lhs.data()[n], rhs, 1e-8) < 1e-8);
        }
    }
}

TEST_CASE("conv2d_valid: results do not depend on the thread count")
{
    std::mt19937_64 rng(4);
    const auto x = random_tensor<float>(Shape{3, 20, 17}, rng);
    const auto p = random_params<float>(7, 3, 5, 3, rng);
    const auto one = conv2d_valid(x, p, 1);
    const auto four = conv2d_valid(x, p, 4);
    CHECK(one == four);
    const auto g = random_tensor<float>(one.shape(), rng);
    const auto b1 = conv2d_backward(x, p, g, 1);
    const auto b4 = conv2d_backward(x, p, g, 4);
    CHECK(b1.input == b4.input);
    CHECK(b1.params == b4.params);
}

TEST_CASE("conv2d_backward: zero cotangent gives zero gradients")
{
    std::mt19937_64 rng(5);
    const auto x = random_tensor<double>(Shape{2, 6, 6}, rng);
    const auto p = random_params<double>(3, 2, 3, 3, rng);
    const auto g = conv2d_backward(x, p, TensorD(Shape{3, 4, 4}));
    for (double v : g.input.data()) CHECK(v == 0.0);
    for (double v : g.params.weights()) CHECK(v == 0.0);
    for (double v : g.params.bias()) CHECK(v == 0.0);
}

TEST_CASE("conv2d_backward: 1x1 kernel is forced analytically")
{
    std::mt19937_64 rng(6);
    const auto x = random_tensor<double>(Shape{1, 4, 5}, rng);
    const auto p = random_params<double>(1, 1, 1, 1, rng);
    const auto g = random_tensor<double>(Shape{1, 4, 5}, rng);
    const auto grads = conv2d_backward(x, p, g);
    double sum = 0.0;
    double dot = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        sum += g.data()[n];
        dot += g.data()[n] * x.data()[n];
    }
    CHECK(grads.params.bias()[0] == doctest::Approx(sum).epsilon(1e-14));
    CHECK(grads.params.weights()[0] == doctest::Approx(dot).epsilon(1e-14));
    for (std::size_t n = 0; n < g.size(); ++n) {
        CHECK(grads.input.data()[n] == doctest::Approx(p.weights()[0] * g.data()[n]).epsilon(1e-14));
    }
}

TEST_CASE("conv2d_backward: matches central differences")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        auto x = random_tensor<double>(Shape{2, 6, 5}, rng);
        auto p = random_params<double>(3, 2, 3, 1, rng);
        const auto g = random_tensor<double>(Shape{3, 4, 5}, rng);
        const auto grads = conv2d_backward(x, p, g);
        // Scalar L = <g, conv(x)>; its gradient is exactly what backward returns.
        auto objective = [&]() {
            const auto y = naive_conv(x, p);
            double s = 0.0;
            for (std::size_t n = 0; n < y.size(); ++n) s += g.data()[n] * y.data()[n];
            return s;
        };
        for (std::size_t n = 0; n < x.size(); ++n) {
            const double num = central_difference(x.data()[n], 1e-4, objective);
            CHECK(relative_error(grads.input.data()[n], num, 1e-8) < 1e-5);
        }
        for (std::size_t n = 0; n < p.weights().size(); ++n) {
            const double num = central_difference(p.weights()[n], 1e-4, objective);
            CHECK(relative_error(grads.params.weights()[n], num, 1e-8) < 1e-5);
        }
        for (std::size_t n = 0; n < p.bias().size(); ++n) {
            const double num = central_difference(p.bias()[n], 1e-4, objective);
            CHECK(relative_error(grads.params.bias()[n], num, 1e-8) < 1e-5);
        }
    }
}

TEST_CASE("conv2d_backward: mismatched cotangent")
{
    CHECK_THROWS_AS(conv2d_backward(TensorF(Shape{1, 5, 5}), ConvParams<float>(2, 1, 3, 3), TensorF(Shape{2, 3, 4})),
                    DimensionError);
}

TEST_CASE("relu and its derivative")
{
    const TensorF x(Shape{1, 1, 3}, std::vector<float>{-1.0f, 0.0f, 2.0f});
    CHECK(relu(x).values() == std::vector<float>{0.0f, 0.0f, 2.0f});

    const TensorF in(Shape{1, 1, 2}, std::vector<float>{-1.0f, 2.0f});
    const TensorF g(Shape{1, 1, 2}, std::vector<float>{5.0f, 7.0f});
    CHECK(relu_backward(in, g).values() == std::vector<float>{0.0f, 7.0f});

    const TensorF zero(Shape{1, 1, 1}, std::vector<float>{0.0f});
    CHECK(relu_backward(zero, TensorF(Shape{1, 1, 1}, 3.0f)).values()[0] == 0.0f);

    std::mt19937_64 rng(8);
    const auto r = random_tensor<float>(Shape{3, 4, 5}, rng);
    CHECK(relu(relu(r)) == relu(r));
    CHECK_THROWS_AS(relu_backward(in, x), DimensionError);
}

TEST_CASE("resize_bilinear")
{
    std::mt19937_64 rng(9);
    const auto t = random_tensor<float>(Shape{2, 5, 7}, rng);
    CHECK(resize_bilinear(t, 1.0) == t);

    const auto constant = resize_bilinear(TensorF(Shape{1, 2, 2}, 7.0f), 2.0);
    CHECK(constant.shape() == Shape{1, 4, 4});
    for (float v : constant.data()) CHECK(v == doctest::Approx(7.0f));

    // Corner-aligned: output rows sample at 0, 1/3, 2/3, 1 of the source span.
    const auto column = resize_bilinear(TensorD(Shape{1, 2, 1}, std::vector<double>{0.0, 10.0}), 2.0);
    REQUIRE(column.shape() == Shape{1, 4, 2});
    const double expected[] = {0.0, 10.0 / 3.0, 20.0 / 3.0, 10.0};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(column(0, i, 0) == doctest::Approx(expected[i]).epsilon(1e-12));
        CHECK(column(0, i, 1) == doctest::Approx(expected[i]).epsilon(1e-12));
    }

    CHECK(resize_bilinear(TensorF(Shape{1, 143, 188}), 0.5).shape() == Shape{1, 72, 94});
    CHECK_THROWS_AS(resize_bilinear(t, 0.0), ArgumentError);
    CHECK_THROWS_AS(resize_bilinear(t, -1.0), ArgumentError);
    CHECK_THROWS_AS(resize_bilinear(TensorF(Shape{1, 1, 1}), 0.1), DimensionError);
}
