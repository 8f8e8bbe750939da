#pragma once

#include <span>
#include <vector>

#include "sketchnet/tensor.hpp"

namespace sketchnet {

/// Weights of the joint generative/discriminative objective.
struct LossConfig {
    double alpha = 1e4;   ///< regularizer weight
    double lambda = 1e9;  ///< divisor keeping exp(-d / lambda) in range

    void validate() const;
};

/// Sum over all elements of (a - b)^2, accumulated in double.
template <typename T>
double pair_sqdist(const Tensor<T>& a, const Tensor<T>& b);

/// log(1 + exp(-distance / lambda)), the per-pair regularizer term. Lies in (0, log 2] for distance >= 0.
double regularizer_term(double distance, double lambda);

template <typename T>
struct LossValue {
    double value = 0.0;
    std::vector<Tensor<T>> grads;  ///< d value / d pred_i
};

/// (1/N) sum_i |S_i - pred_i|^2 and its gradient (2/N)(pred_i - S_i).
template <typename T>
LossValue<T> generative_loss(std::span<const Tensor<T>> preds, std::span<const Tensor<T>> targets);

/// Mean over ordered pairs i != j of log(1 + exp(-|S_i - pred_j|^2 / lambda)).
/// Needs at least two subjects.
template <typename T>
LossValue<T> discriminative_regularizer(std::span<const Tensor<T>> preds, std::span<const Tensor<T>> targets,
                                        const LossConfig& cfg);

template <typename T>
struct JointLoss {
    double generative = 0.0;
    double discriminative = 0.0;  ///< unweighted; 0 when alpha == 0 or N == 1
    double total = 0.0;           ///< generative + alpha * discriminative
    std::vector<Tensor<T>> grads;
};

/// L_gen + alpha * L_discrim. With a single subject the regularizer is
/// skipped and a warning is written to std::clog.
template <typename T>
JointLoss<T> joint_loss(std::span<const Tensor<T>> preds, std::span<const Tensor<T>> targets, const LossConfig& cfg);

}  // namespace sketchnet
