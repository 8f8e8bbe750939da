#include <benchmark/benchmark.h>

#include <random>

#include "sketchnet/sketchnet.hpp"

using namespace sketchnet;

namespace {

TensorF random_image(const Shape& shape, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 255.0f);
    TensorF t(shape);
    for (auto& v : t.data()) v = u(rng);
    return t;
}

ConvParams<float> random_layer(std::size_t out, std::size_t in, std::size_t k, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> g(0.0f, 0.01f);
    ConvParams<float> p(out, in, k, k);
    for (auto& v : p.weights()) v = g(rng);
    return p;
}

// args: in_channels, out_channels, kernel, extent
void BM_Conv2dForward(benchmark::State& state)
{
    const auto in = static_cast<std::size_t>(state.range(0));
    const auto out = static_cast<std::size_t>(state.range(1));
    const auto k = static_cast<std::size_t>(state.range(2));
    const auto n = static_cast<std::size_t>(state.range(3));
    const auto x = random_image(Shape{in, n, n}, 1);
    const auto p = random_layer(out, in, k, 2);
    for (auto _ : state) benchmark::DoNotOptimize(conv2d_valid(x, p));
    const auto m = n - k + 1;
    state.counters["MACs"] = benchmark::Counter(static_cast<double>(out * in * k * k * m * m),
                                                benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Conv2dForward)->Args({5, 64, 5, 64})->Args({64, 32, 5, 64})->Args({32, 16, 1, 64})->Args({8, 1, 3, 64});

void BM_Conv2dBackward(benchmark::State& state)
{
    const auto in = static_cast<std::size_t>(state.range(0));
    const auto out = static_cast<std::size_t>(state.range(1));
    const auto k = static_cast<std::size_t>(state.range(2));
    const auto n = static_cast<std::size_t>(state.range(3));
    const auto x = random_image(Shape{in, n, n}, 3);
    const auto p = random_layer(out, in, k, 4);
    const auto g = random_image(Shape{out, n - k + 1, n - k + 1}, 5);
    for (auto _ : state) benchmark::DoNotOptimize(conv2d_backward(x, p, g));
}
BENCHMARK(BM_Conv2dBackward)->Args({5, 64, 5, 64})->Args({64, 32, 5, 64});

// Single full-size photo, the per-image runtime measurement.
void BM_FullImageForward(benchmark::State& state, const char* arch)
{
    const auto net = init_network<float>(builtin_spec(arch), 0);
    const auto x = random_image(Shape{5, kPhotoHeight, kPhotoWidth}, 6);
    for (auto _ : state) benchmark::DoNotOptimize(predict(net, x));
}
BENCHMARK_CAPTURE(BM_FullImageForward, sr, "sr")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FullImageForward, small, "small")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FullImageForward, medium, "medium")->Unit(benchmark::kMillisecond);

void BM_TrainIteration(benchmark::State& state)
{
    const auto spec = builtin_spec("small");
    const auto data = crop_dataset(synth_pairs(1, 8), 41, 41, spec.total_shrink());
    std::vector<TensorF> inputs;
    std::vector<TensorF> targets;
    for (const auto& p : data.pairs) {
        inputs.push_back(network_input(p.photo, true));
        targets.push_back(p.sketch);
    }
    const auto net = init_network<float>(spec, 0);
    for (auto _ : state) {
        auto bg = batch_gradient<float>(net, inputs, targets, LossConfig{});
        benchmark::DoNotOptimize(sgd_step(net, bg.grads, 1e-11));
    }
}
BENCHMARK(BM_TrainIteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
