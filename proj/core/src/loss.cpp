#include "sketchnet/loss.hpp"

#include <cmath>
#include <iostream>
#include <string>

namespace sketchnet {

namespace {

template <typename T>
void check_batch(std::span<const Tensor<T>> preds, std::span<const Tensor<T>> targets)
{
    if (preds.empty()) throw ArgumentError("loss needs at least one prediction/target pair");
    if (preds.size() != targets.size()) {
        throw ArgumentError(std::to_string(preds.size()) + " predictions but " + std::to_string(targets.size()) +
                            " targets");
    }
    for (std::size_t n = 0; n < preds.size(); ++n) {
        if (preds[n].shape() != targets[n].shape()) {
            throw DimensionError("prediction " + std::to_string(n) + " is " + to_string(preds[n].shape()) +
                                 " but its target is " + to_string(targets[n].shape()));
        }
    }
}

double softplus(double z)
{
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double logistic(double z)
{
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

void LossConfig::validate() const
{
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ArgumentError("alpha must be a finite non-negative number");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be a finite positive number");
}

template <typename T>
double pair_sqdist(const Tensor<T>& a, const Tensor<T>& b)
{
    if (a.shape() != b.shape()) {
        throw DimensionError("cannot compare " + to_string(a.shape()) + " with " + to_string(b.shape()));
    }
    double sum = 0.0;
    auto x = a.data();
    auto y = b.data();
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double d = static_cast<double>(x[n]) - static_cast<double>(y[n]);
        sum += d * d;
    }
    return sum;
}

double regularizer_term(double distance, double lambda)
{
    return softplus(-distance / lambda);
}

template <typename T>
LossValue<T> generative_loss(std::span<const Tensor<T>> preds, std::span<const Tensor<T>> targets)
{
    check_batch(preds, targets);
    const double n = static_cast<double>(preds.size());
    LossValue<T> out;
    out.grads.reserve(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        out.value += pair_sqdist(targets[i], preds[i]);
        Tensor<T> g(preds[i].shape());
        auto dst = g.data();
        auto p = preds[i].data();
        auto s = targets[i].data();
        for (std::size_t k = 0; k < dst.size(); ++k) {
            dst[k] = static_cast<T>(2.0 / n * (static_cast<double>(p[k]) - static_cast<double>(s[k])));
        }
        out.grads.push_back(std::move(g));
    }
    out.value /= n;
    return out;
}

template <typename T>
LossValue<T> discriminative_regularizer(std::span<const Tensor<T>> preds, std::span<const Tensor<T>> targets,
                                        const LossConfig& cfg)
{
    check_batch(preds, targets);
    cfg.validate();
    const std::size_t n = preds.size();
    if (n < 2) throw ArgumentError("the discriminative regularizer needs at least two subjects");

    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
    LossValue<T> out;
    std::vector<std::vector<double>> acc(n);
    for (std::size_t j = 0; j < n; ++j) acc[j].assign(preds[j].size(), 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = pair_sqdist(targets[i], preds[j]);
            const double z = -d / cfg.lambda;
            out.value += softplus(z);
            // d/dpred_j of softplus(-d/lambda) = -sigma(-d/lambda) / lambda * 2 (pred_j - S_i)
            const double scale = -2.0 * logistic(z) / (cfg.lambda * pairs);
            auto p = preds[j].data();
            auto s = targets[i].data();
            auto& a = acc[j];
            for (std::size_t k = 0; k < a.size(); ++k) {
                a[k] += scale * (static_cast<double>(p[k]) - static_cast<double>(s[k]));
            }
        }
    }
    out.value /= pairs;
    out.grads.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.grads.emplace_back(preds[j].shape(), std::vector<T>(acc[j].begin(), acc[j].end()));
    }
    return out;
}

template <typename T>
JointLoss<T> joint_loss(std::span<const Tensor<T>> preds, std::span<const Tensor<T>> targets, const LossConfig& cfg)
{
    cfg.validate();
    auto gen = generative_loss(preds, targets);
    JointLoss<T> out;
    out.generative = gen.value;
    out.grads = std::move(gen.grads);

    if (preds.size() < 2) {
        if (cfg.alpha > 0.0) {
            std::clog << "warning: batch of one subject, skipping the discriminative regularizer\n";
        }
    } else if (cfg.alpha > 0.0) {
        auto reg = discriminative_regularizer(preds, targets, cfg);
        out.discriminative = reg.value;
        for (std::size_t j = 0; j < preds.size(); ++j) {
            auto dst = out.grads[j].data();
            auto src = reg.grads[j].data();
            for (std::size_t k = 0; k < dst.size(); ++k) {
                dst[k] = static_cast<T>(static_cast<double>(dst[k]) + cfg.alpha * static_cast<double>(src[k]));
            }
        }
    }
    out.total = out.generative + cfg.alpha * out.discriminative;
    return out;
}

#define SKETCHNET_INSTANTIATE_LOSS(T)                                                                             \
    template double pair_sqdist<T>(const Tensor<T>&, const Tensor<T>&);                                           \
    template LossValue<T> generative_loss<T>(std::span<const Tensor<T>>, std::span<const Tensor<T>>);             \
    template LossValue<T> discriminative_regularizer<T>(std::span<const Tensor<T>>, std::span<const Tensor<T>>,   \
                                                        const LossConfig&);                                       \
    template JointLoss<T> joint_loss<T>(std::span<const Tensor<T>>, std::span<const Tensor<T>>, const LossConfig&);

SKETCHNET_INSTANTIATE_LOSS(float)
SKETCHNET_INSTANTIATE_LOSS(double)

#undef SKETCHNET_INSTANTIATE_LOSS

}  // namespace sketchnet
