#include "sketchnet/training.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "sketchnet/model_io.hpp"

namespace sketchnet {

void TrainConfig::validate(std::size_t dataset_size) const
{
    loss.validate();
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ArgumentError("learning rate must be a finite non-negative number");
    }
    if (iterations == 0) throw ArgumentError("iterations must be positive");
    if (batch_size == 0) throw ArgumentError("batch size must be positive");
    if (dataset_size == 0) throw ArgumentError("training set is empty");
    if (batch_size > dataset_size) {
        throw ArgumentError("batch size " + std::to_string(batch_size) + " exceeds the " +
                            std::to_string(dataset_size) + " available training pairs");
    }
    if (loss.alpha > 0.0 && batch_size < 2) {
        throw ArgumentError("the discriminative regularizer (alpha > 0) needs a batch size of at least 2");
    }
    if (checkpoint_every > 0 && checkpoint_path.empty()) {
        throw ArgumentError("checkpointing requested without a checkpoint path");
    }
}

std::vector<std::size_t> sample_batch(std::mt19937_64& rng, std::size_t dataset_size, std::size_t batch_size)
{
    if (batch_size > dataset_size) throw ArgumentError("batch larger than dataset");
    std::vector<std::size_t> order(dataset_size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t n = 0; n < batch_size; ++n) {
        std::uniform_int_distribution<std::size_t> pick(n, dataset_size - 1);
        std::swap(order[n], order[pick(rng)]);
    }
    order.resize(batch_size);
    return order;
}

template <typename T>
BatchGradient<T> batch_gradient(const Network<T>& net, std::span<const Tensor<T>> inputs,
                                std::span<const Tensor<T>> targets, const LossConfig& cfg, unsigned threads)
{
    if (inputs.size() != targets.size()) throw ArgumentError("inputs and targets differ in length");
    std::vector<ForwardResult<T>> passes;
    std::vector<Tensor<T>> outputs;
    passes.reserve(inputs.size());
    outputs.reserve(inputs.size());
    for (const auto& input : inputs) {
        passes.push_back(forward(net, input, threads));
        outputs.push_back(passes.back().output);
    }

    BatchGradient<T> result{joint_loss<T>(outputs, targets, cfg), zero_gradients(net)};
    for (std::size_t i = 0; i < passes.size(); ++i) {
        const auto grads = backward(net, passes[i].cache, result.loss.grads[i], threads);
        for (std::size_t layer = 0; layer < grads.size(); ++layer) {
            auto& acc = result.grads[layer];
            auto w = acc.weights();
            auto gw = grads[layer].weights();
            for (std::size_t k = 0; k < w.size(); ++k) w[k] += gw[k];
            auto b = acc.bias();
            auto gb = grads[layer].bias();
            for (std::size_t k = 0; k < b.size(); ++k) b[k] += gb[k];
        }
    }
    return result;
}

template <typename T>
Network<T> sgd_step(const Network<T>& net, const std::vector<ConvParams<T>>& grads, double learning_rate)
{
    if (grads.size() != net.params().size()) {
        throw DimensionError("gradient has " + std::to_string(grads.size()) + " layers, network has " +
                             std::to_string(net.params().size()));
    }
    Network<T> next = net;
    auto& params = next.mutable_params();
    for (std::size_t layer = 0; layer < params.size(); ++layer) {
        if (!params[layer].same_shape(grads[layer])) {
            throw DimensionError("gradient shape mismatch at layer " + std::to_string(layer));
        }
        auto update = [learning_rate](std::span<T> p, std::span<const T> g) {
            for (std::size_t k = 0; k < p.size(); ++k) {
                p[k] = static_cast<T>(static_cast<double>(p[k]) - learning_rate * static_cast<double>(g[k]));
            }
        };
        update(params[layer].weights(), grads[layer].weights());
        update(params[layer].bias(), grads[layer].bias());
    }
    return next;
}

template <typename T>
TrainResult<T> train(std::span<const Tensor<T>> inputs, std::span<const Tensor<T>> targets, const NetworkSpec& spec,
                     const TrainConfig& cfg, const IterationObserver& observer)
{
    spec.validate();
    cfg.validate(inputs.size());
    if (inputs.size() != targets.size()) throw ArgumentError("inputs and targets differ in length");
    const std::size_t shrink = spec.total_shrink();
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        const auto& in = inputs[n].shape();
        const Shape expected{1, in.height - std::min(in.height, shrink), in.width - std::min(in.width, shrink)};
        if (in.channels != spec.in_channels || in.height <= shrink || in.width <= shrink ||
            targets[n].shape() != expected) {
            throw DimensionError("training pair " + std::to_string(n) + " (input " + to_string(in) + ", target " +
                                 to_string(targets[n].shape()) + ") is incompatible with a " +
                                 std::to_string(spec.in_channels) + "-channel network of shrink " +
                                 std::to_string(shrink));
        }
    }

    TrainResult<T> result{init_network<T>(spec, cfg.seed), {}};
    result.history.reserve(cfg.iterations);
    std::mt19937_64 rng(cfg.seed);
    std::vector<Tensor<T>> batch_inputs;
    std::vector<Tensor<T>> batch_targets;

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        batch_inputs.clear();
        batch_targets.clear();
        for (std::size_t index : sample_batch(rng, inputs.size(), cfg.batch_size)) {
            batch_inputs.push_back(inputs[index]);
            batch_targets.push_back(targets[index]);
        }
        auto step = batch_gradient<T>(result.net, batch_inputs, batch_targets, cfg.loss, cfg.threads);
        const IterationRecord record{t, step.loss.generative, step.loss.discriminative, step.loss.total};
        if (!std::isfinite(record.total)) {
            throw NumericError("loss became non-finite at iteration " + std::to_string(t) +
                               "; lower the learning rate");
        }
        result.net = sgd_step(result.net, step.grads, cfg.learning_rate);
        result.history.push_back(record);
        if (observer) observer(record);
        if (cfg.checkpoint_every > 0 && t % cfg.checkpoint_every == 0) save_model(result.net, cfg.checkpoint_path);
    }
    return result;
}

TrainResult<float> train(const Dataset& dataset, const NetworkSpec& spec, const TrainConfig& cfg,
                         const IterationObserver& observer)
{
    if (spec.in_channels != 3 && spec.in_channels != 5) {
        throw ArgumentError("photo networks take 3 (RGB) or 5 (RGB+XY) input channels, spec has " +
                            std::to_string(spec.in_channels));
    }
    dataset.validate();
    std::vector<TensorF> inputs;
    std::vector<TensorF> targets;
    inputs.reserve(dataset.size());
    targets.reserve(dataset.size());
    for (const auto& pair : dataset.pairs) {
        inputs.push_back(network_input(pair.photo, spec.in_channels == 5));
        targets.push_back(pair.sketch);
    }
    return train<float>(inputs, targets, spec, cfg, observer);
}

#define SKETCHNET_INSTANTIATE_TRAINING(T)                                                                        \
    template BatchGradient<T> batch_gradient<T>(const Network<T>&, std::span<const Tensor<T>>,                   \
                                                std::span<const Tensor<T>>, const LossConfig&, unsigned);        \
    template Network<T> sgd_step<T>(const Network<T>&, const std::vector<ConvParams<T>>&, double);               \
    template TrainResult<T> train<T>(std::span<const Tensor<T>>, std::span<const Tensor<T>>, const NetworkSpec&, \
                                     const TrainConfig&, const IterationObserver&);

SKETCHNET_INSTANTIATE_TRAINING(float)
SKETCHNET_INSTANTIATE_TRAINING(double)

#undef SKETCHNET_INSTANTIATE_TRAINING

}  // namespace sketchnet
