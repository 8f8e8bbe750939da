#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sketchnet/ops.hpp"
#include "sketchnet/tensor.hpp"

namespace sketchnet {

enum class Activation { relu, none };

std::string_view to_string(Activation a) noexcept;
Activation parse_activation(std::string_view name);

struct LayerSpec {
    std::size_t kernel_size = 1;
    std::size_t out_channels = 1;
    Activation activation = Activation::relu;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Architecture of a stride-1, unpadded stack of square convolutions.
///
/// The last layer always emits one linear channel (the grayscale sketch).
struct NetworkSpec {
    std::size_t in_channels = 5;
    std::vector<LayerSpec> layers;

    /// Throws ArgumentError if any structural invariant is violated.
    void validate() const;

    /// Sum of (kernel - 1) over all layers: how much each spatial extent shrinks.
    [[nodiscard]] std::size_t total_shrink() const noexcept;

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct ReceptiveField {
    std::size_t size = 1;
    std::size_t total_shrink = 0;
};

ReceptiveField receptive_field(const NetworkSpec& spec) noexcept;

/// Names accepted by builtin_spec().
const std::vector<std::string>& builtin_spec_names();

/// One of the four reference architectures: "sr" (the 9-1-5 super-resolution
/// net) and the six-layer "small", "medium" and "large" variants, each with
/// twice the filters of the previous one. `in_channels` is 5 with XY
/// coordinate channels, 3 without.
NetworkSpec builtin_spec(std::string_view name, std::size_t in_channels = 5);

/// Learned parameters bound to an architecture.
template <typename T>
class Network {
public:
    explicit Network(NetworkSpec spec);
    Network(NetworkSpec spec, std::vector<ConvParams<T>> params);

    [[nodiscard]] const NetworkSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const std::vector<ConvParams<T>>& params() const noexcept { return params_; }

    /// Mutable access invalidates forward caches taken before the call.
    [[nodiscard]] std::vector<ConvParams<T>>& mutable_params() noexcept;

    /// Changes whenever parameters may have changed; used to reject stale caches.
    [[nodiscard]] std::uint64_t revision() const noexcept { return revision_; }

    [[nodiscard]] std::size_t parameter_count() const noexcept;

    template <typename U>
    [[nodiscard]] Network<U> cast() const;

    friend bool operator==(const Network& a, const Network& b)
    {
        return a.spec_ == b.spec_ && a.params_ == b.params_;
    }

private:
    NetworkSpec spec_;
    std::vector<ConvParams<T>> params_;
    std::uint64_t revision_;
};

/// Zero-mean Gaussian weights with standard deviation 0.01 and zero biases,
/// drawn from a mt19937_64 seeded with `seed`.
template <typename T>
Network<T> init_network(const NetworkSpec& spec, std::uint64_t seed);

/// Per-layer intermediates a backward pass needs.
template <typename T>
struct ForwardCache {
    std::uint64_t revision = 0;
    std::vector<Tensor<T>> layer_inputs;
    std::vector<Tensor<T>> pre_activations;
};

template <typename T>
struct ForwardResult {
    Tensor<T> output;
    ForwardCache<T> cache;
};

/// Minimum input extent for which the network produces at least one pixel.
std::size_t minimum_input_extent(const NetworkSpec& spec) noexcept;

template <typename T>
ForwardResult<T> forward(const Network<T>& net, const Tensor<T>& input, unsigned threads = 1);

/// forward() without keeping the cache.
template <typename T>
Tensor<T> predict(const Network<T>& net, const Tensor<T>& input, unsigned threads = 1);

template <typename T>
std::vector<ConvParams<T>> backward(const Network<T>& net, const ForwardCache<T>& cache,
                                    const Tensor<T>& grad_output, unsigned threads = 1);

/// Zero gradients shaped like net.params().
template <typename T>
std::vector<ConvParams<T>> zero_gradients(const Network<T>& net);

}  // namespace sketchnet
