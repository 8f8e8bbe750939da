#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "sketchnet/dataset.hpp"
#include "sketchnet/loss.hpp"
#include "sketchnet/network.hpp"

namespace sketchnet {

struct TrainConfig {
    double learning_rate = 1e-11;
    std::size_t iterations = 1000;
    std::size_t batch_size = 8;
    LossConfig loss;
    std::uint64_t seed = 0;
    std::size_t checkpoint_every = 0;       ///< 0 disables checkpoints
    std::filesystem::path checkpoint_path;  ///< written with save_model
    unsigned threads = 1;

    /// Checks every invariant against a dataset of `dataset_size` pairs.
    void validate(std::size_t dataset_size) const;
};

struct IterationRecord {
    std::size_t iteration = 0;  ///< 1-based
    double generative = 0.0;
    double discriminative = 0.0;
    double total = 0.0;
};

template <typename T>
struct TrainResult {
    Network<T> net;
    std::vector<IterationRecord> history;
};

/// Called after each update with the record of that iteration.
using IterationObserver = std::function<void(const IterationRecord&)>;

/// Draws `batch_size` distinct indices in [0, dataset_size) from `rng`.
std::vector<std::size_t> sample_batch(std::mt19937_64& rng, std::size_t dataset_size, std::size_t batch_size);

template <typename T>
struct BatchGradient {
    JointLoss<T> loss;
    std::vector<ConvParams<T>> grads;  ///< summed over the batch
};

/// Forward every input, take the joint-loss gradient with respect to each
/// output, backpropagate each one and sum the parameter gradients.
template <typename T>
BatchGradient<T> batch_gradient(const Network<T>& net, std::span<const Tensor<T>> inputs,
                                std::span<const Tensor<T>> targets, const LossConfig& cfg, unsigned threads = 1);

/// params <- params - learning_rate * grads.
template <typename T>
Network<T> sgd_step(const Network<T>& net, const std::vector<ConvParams<T>>& grads, double learning_rate);

/// Mini-batch SGD from init_network(spec, cfg.seed). Inputs are network-ready
/// tensors (XY channels already applied when the spec expects them).
template <typename T>
TrainResult<T> train(std::span<const Tensor<T>> inputs, std::span<const Tensor<T>> targets, const NetworkSpec& spec,
                     const TrainConfig& cfg, const IterationObserver& observer = {});

/// Dataset front end: adds XY channels when spec.in_channels == 5.
TrainResult<float> train(const Dataset& dataset, const NetworkSpec& spec, const TrainConfig& cfg,
                         const IterationObserver& observer = {});

}  // namespace sketchnet
