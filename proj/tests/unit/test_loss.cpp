#include <doctest.h>

#include <limits>
#include <random>

#include "oracles.hpp"

using namespace sketchnet;
using namespace sketchnet::testing;

namespace {

std::vector<TensorD> random_batch(std::size_t n, const Shape& shape, std::mt19937_64& rng, double lo, double hi)
{
    std::vector<TensorD> out;
    for (std::size_t k = 0; k < n; ++k) out.push_back(random_tensor<double>(shape, rng, lo, hi));
    return out;
}

}  // namespace

TEST_CASE("pair_sqdist is a plain sum of squares")
{
    const TensorF a(Shape{1, 2, 2}, std::vector<float>{1, 2, 3, 4});
    const TensorF b(Shape{1, 2, 2}, std::vector<float>{0, 0, 0, 0});
    CHECK(pair_sqdist(a, b) == 30.0);
    CHECK(pair_sqdist(a, a) == 0.0);
    CHECK_THROWS_AS(pair_sqdist(a, TensorF(Shape{1, 2, 3})), DimensionError);
}

TEST_CASE("regularizer term")
{
    CHECK(regularizer_term(0.0, 1e9) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    const double far = regularizer_term(5e10, 1e9);
    CHECK(far > 0.0);
    CHECK(far < 1e-12);
    CHECK(regularizer_term(1e300, 1.0) >= 0.0);

    double previous = regularizer_term(0.0, 10.0);
    for (double d = 0.5; d < 500.0; d *= 1.7) {
        const double v = regularizer_term(d, 10.0);
        CHECK(v > 0.0);
        CHECK(v <= std::log(2.0));
        CHECK(v < previous);
        previous = v;
    }
}

TEST_CASE("loss config validation")
{
    CHECK_NOTHROW(LossConfig{}.validate());
    CHECK(LossConfig{}.alpha == 1e4);
    CHECK(LossConfig{}.lambda == 1e9);
    CHECK_THROWS_AS((LossConfig{-1.0, 1.0}.validate()), ArgumentError);
    CHECK_THROWS_AS((LossConfig{1.0, 0.0}.validate()), ArgumentError);
    CHECK_THROWS_AS((LossConfig{std::numeric_limits<double>::quiet_NaN(), 1.0}.validate()), ArgumentError);
}

TEST_CASE("joint loss equals the double-loop definition")
{
    std::mt19937_64 rng(1);
    const Shape shape{1, 3, 2};
    for (int trial = 0; trial < 20; ++trial) {
        const auto preds = random_batch(3, shape, rng, -2.0, 2.0);
        const auto targets = random_batch(3, shape, rng, -2.0, 2.0);
        const LossConfig cfg{2.5, 10.0};
        const auto loss = joint_loss<double>(preds, targets, cfg);
        const double expected = naive_joint_loss(preds, targets, cfg.alpha, cfg.lambda);
        CHECK(std::abs(loss.total - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
        CHECK(loss.total == doctest::Approx(loss.generative + cfg.alpha * loss.discriminative).epsilon(1e-15));
    }
}

TEST_CASE("joint loss gradient matches central differences")
{
    std::mt19937_64 rng(2);
    const Shape shape{1, 2, 3};
    for (int trial = 0; trial < 10; ++trial) {
        auto preds = random_batch(3, shape, rng, -3.0, 3.0);
        const auto targets = random_batch(3, shape, rng, -3.0, 3.0);
        const LossConfig cfg{4.0, 10.0};
        const auto loss = joint_loss<double>(preds, targets, cfg);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            for (std::size_t n = 0; n < preds[i].size(); ++n) {
                const double numeric = central_difference(preds[i].data()[n], 1e-5, [&]() {
                    return naive_joint_loss(preds, targets, cfg.alpha, cfg.lambda);
                });
                CHECK(relative_error(loss.grads[i].data()[n], numeric, 1e-6) < 1e-6);
            }
        }
    }
}

TEST_CASE("regularizer-only gradient matches central differences")
{
    std::mt19937_64 rng(3);
    auto preds = random_batch(4, Shape{1, 2, 2}, rng, 0.0, 5.0);
    const auto targets = random_batch(4, Shape{1, 2, 2}, rng, 0.0, 5.0);
    const LossConfig cfg{1.0, 7.0};
    const auto reg = discriminative_regularizer<double>(preds, targets, cfg);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        for (std::size_t n = 0; n < preds[i].size(); ++n) {
            const double numeric = central_difference(preds[i].data()[n], 1e-5, [&]() {
                return naive_joint_loss(preds, targets, 1.0, cfg.lambda) -
                       naive_joint_loss(preds, targets, 0.0, cfg.lambda);
            });
            CHECK(relative_error(reg.grads[i].data()[n], numeric, 1e-8) < 1e-5);
        }
    }
}

TEST_CASE("alpha = 0 reduces to the generative loss")
{
    std::mt19937_64 rng(4);
    const auto preds = random_batch(4, Shape{1, 3, 3}, rng, 0.0, 255.0);
    const auto targets = random_batch(4, Shape{1, 3, 3}, rng, 0.0, 255.0);
    const auto joint = joint_loss<double>(preds, targets, LossConfig{0.0, 1e9});
    const auto gen = generative_loss<double>(preds, targets);
    CHECK(joint.total == gen.value);
    CHECK(joint.discriminative == 0.0);
    for (std::size_t i = 0; i < preds.size(); ++i) CHECK(joint.grads[i] == gen.grads[i]);
}

TEST_CASE("generative loss closed form")
{
    const std::vector<TensorD> preds{TensorD(Shape{1, 1, 2}, 1.0), TensorD(Shape{1, 1, 2}, 3.0)};
    const std::vector<TensorD> targets{TensorD(Shape{1, 1, 2}, 0.0), TensorD(Shape{1, 1, 2}, 0.0)};
    const auto gen = generative_loss<double>(preds, targets);
    CHECK(gen.value == (2.0 + 18.0) / 2.0);
    CHECK(gen.grads[0].data()[0] == 1.0);
    CHECK(gen.grads[1].data()[0] == 3.0);
}

TEST_CASE("regularizer at coincident and distant pairs")
{
    // Every prediction equals every target: each ordered pair contributes log 2.
    const std::vector<TensorD> same(3, TensorD(Shape{1, 2, 2}, 5.0));
    const auto reg = discriminative_regularizer<double>(same, same, LossConfig{1.0, 1e9});
    CHECK(reg.value == doctest::Approx(std::log(2.0)).epsilon(1e-15));

    const std::vector<TensorD> preds{TensorD(Shape{1, 1, 1}, 0.0), TensorD(Shape{1, 1, 1}, 1e6)};
    const std::vector<TensorD> targets{TensorD(Shape{1, 1, 1}, 0.0), TensorD(Shape{1, 1, 1}, 1e6)};
    const auto far = discriminative_regularizer<double>(preds, targets, LossConfig{1.0, 1.0});
    CHECK(far.value >= 0.0);
    CHECK(far.value < 1e-300);
}

TEST_CASE("loss argument checks")
{
    const std::vector<TensorD> one{TensorD(Shape{1, 2, 2})};
    CHECK_THROWS_AS(discriminative_regularizer<double>(one, one, LossConfig{}), ArgumentError);
    const auto single = joint_loss<double>(one, one, LossConfig{});
    CHECK(single.discriminative == 0.0);

    const std::vector<TensorD> two(2, TensorD(Shape{1, 2, 2}));
    CHECK_THROWS_AS(joint_loss<double>(one, two, LossConfig{}), ArgumentError);
    const std::vector<TensorD> none;
    CHECK_THROWS_AS(generative_loss<double>(none, none), ArgumentError);
    const std::vector<TensorD> wrong(2, TensorD(Shape{1, 2, 3}));
    CHECK_THROWS_AS(joint_loss<double>(two, wrong, LossConfig{}), DimensionError);
}
