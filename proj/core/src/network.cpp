#include "sketchnet/network.hpp"

#include <atomic>
#include <random>

namespace sketchnet {

namespace {

std::uint64_t next_revision()
{
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

template <typename T>
std::vector<ConvParams<T>> zero_params(const NetworkSpec& spec)
{
    spec.validate();
    std::vector<ConvParams<T>> params;
    params.reserve(spec.layers.size());
    std::size_t in = spec.in_channels;
    for (const auto& layer : spec.layers) {
        params.emplace_back(layer.out_channels, in, layer.kernel_size, layer.kernel_size);
        in = layer.out_channels;
    }
    return params;
}

}  // namespace

std::string_view to_string(Activation a) noexcept
{
    return a == Activation::relu ? "relu" : "none";
}

Activation parse_activation(std::string_view name)
{
    if (name == "relu") return Activation::relu;
    if (name == "none" || name == "linear") return Activation::none;
    throw ArgumentError("unknown activation '" + std::string(name) + "' (expected relu or none)");
}

void NetworkSpec::validate() const
{
    if (in_channels == 0) throw ArgumentError("network needs at least one input channel");
    if (layers.empty()) throw ArgumentError("network needs at least one layer");
    for (std::size_t n = 0; n < layers.size(); ++n) {
        const auto& layer = layers[n];
        if (layer.kernel_size == 0 || layer.kernel_size % 2 == 0) {
            throw ArgumentError("layer " + std::to_string(n) + ": kernel size must be odd and positive, got " +
                                std::to_string(layer.kernel_size));
        }
        if (layer.out_channels == 0) {
            throw ArgumentError("layer " + std::to_string(n) + ": out_channels must be positive");
        }
    }
    const auto& last = layers.back();
    if (last.out_channels != 1 || last.activation != Activation::none) {
        throw ArgumentError("final layer must have one output channel and no activation");
    }
}

std::size_t NetworkSpec::total_shrink() const noexcept
{
    std::size_t shrink = 0;
    for (const auto& layer : layers) shrink += layer.kernel_size - 1;
    return shrink;
}

ReceptiveField receptive_field(const NetworkSpec& spec) noexcept
{
    const std::size_t shrink = spec.total_shrink();
    return ReceptiveField{shrink + 1, shrink};
}

const std::vector<std::string>& builtin_spec_names()
{
    static const std::vector<std::string> names{"sr", "small", "medium", "large"};
    return names;
}

NetworkSpec builtin_spec(std::string_view name, std::size_t in_channels)
{
    auto stack = [in_channels](std::vector<std::size_t> kernels, std::vector<std::size_t> widths) {
        NetworkSpec spec{in_channels, {}};
        for (std::size_t n = 0; n < kernels.size(); ++n) {
            const bool last = n + 1 == kernels.size();
            spec.layers.push_back({kernels[n], widths[n], last ? Activation::none : Activation::relu});
        }
        spec.validate();
        return spec;
    };
    const std::vector<std::size_t> six{5, 5, 1, 1, 3, 3};
    if (name == "sr") return stack({9, 1, 5}, {64, 32, 1});
    if (name == "small") return stack(six, {64, 32, 16, 16, 8, 1});
    if (name == "medium") return stack(six, {128, 64, 32, 32, 16, 1});
    if (name == "large") return stack(six, {256, 128, 64, 64, 32, 1});

    std::string valid;
    for (const auto& n : builtin_spec_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ArgumentError("unknown architecture '" + std::string(name) + "' (valid: " + valid + ")");
}

template <typename T>
Network<T>::Network(NetworkSpec spec) : Network(spec, zero_params<T>(spec))
{
}

template <typename T>
Network<T>::Network(NetworkSpec spec, std::vector<ConvParams<T>> params)
    : spec_(std::move(spec)), params_(std::move(params)), revision_(next_revision())
{
    const auto expected = zero_params<T>(spec_);
    if (params_.size() != expected.size()) {
        throw DimensionError("network spec has " + std::to_string(expected.size()) + " layers but " +
                             std::to_string(params_.size()) + " parameter blocks were given");
    }
    for (std::size_t n = 0; n < params_.size(); ++n) {
        if (!params_[n].same_shape(expected[n])) {
            throw DimensionError("layer " + std::to_string(n) + " parameters do not match the spec");
        }
    }
}

template <typename T>
std::vector<ConvParams<T>>& Network<T>::mutable_params() noexcept
{
    revision_ = next_revision();
    return params_;
}

template <typename T>
std::size_t Network<T>::parameter_count() const noexcept
{
    std::size_t count = 0;
    for (const auto& p : params_) count += p.weights().size() + p.bias().size();
    return count;
}

template <typename T>
template <typename U>
Network<U> Network<T>::cast() const
{
    std::vector<ConvParams<U>> converted;
    converted.reserve(params_.size());
    for (const auto& p : params_) {
        converted.emplace_back(p.out_channels(), p.in_channels(), p.kernel_h(), p.kernel_w(),
                               std::vector<U>(p.weights().begin(), p.weights().end()),
                               std::vector<U>(p.bias().begin(), p.bias().end()));
    }
    return Network<U>(spec_, std::move(converted));
}

template <typename T>
Network<T> init_network(const NetworkSpec& spec, std::uint64_t seed)
{
    Network<T> net(spec);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 0.01);
    for (auto& layer : net.mutable_params()) {
        for (auto& w : layer.weights()) w = static_cast<T>(gauss(rng));
    }
    return net;
}

std::size_t minimum_input_extent(const NetworkSpec& spec) noexcept
{
    return spec.total_shrink() + 1;
}

template <typename T>
ForwardResult<T> forward(const Network<T>& net, const Tensor<T>& input, unsigned threads)
{
    const auto& spec = net.spec();
    const std::size_t min_extent = minimum_input_extent(spec);
    if (input.channels() != spec.in_channels) {
        throw DimensionError("network expects " + std::to_string(spec.in_channels) + " input channels, got " +
                             to_string(input.shape()));
    }
    if (input.height() < min_extent || input.width() < min_extent) {
        throw DimensionError("input " + to_string(input.shape()) + " is too small; minimum spatial size is " +
                             std::to_string(min_extent) + "x" + std::to_string(min_extent));
    }

    ForwardResult<T> result{Tensor<T>(), ForwardCache<T>{net.revision(), {}, {}}};
    auto& cache = result.cache;
    cache.layer_inputs.reserve(spec.layers.size());
    cache.pre_activations.reserve(spec.layers.size());

    Tensor<T> current = input;
    for (std::size_t n = 0; n < spec.layers.size(); ++n) {
        Tensor<T> z = conv2d_valid(current, net.params()[n], threads);
        cache.layer_inputs.push_back(std::move(current));
        current = spec.layers[n].activation == Activation::relu ? relu(z) : z;
        cache.pre_activations.push_back(std::move(z));
    }
    result.output = std::move(current);
    return result;
}

template <typename T>
Tensor<T> predict(const Network<T>& net, const Tensor<T>& input, unsigned threads)
{
    return forward(net, input, threads).output;
}

template <typename T>
std::vector<ConvParams<T>> zero_gradients(const Network<T>& net)
{
    return zero_params<T>(net.spec());
}

template <typename T>
std::vector<ConvParams<T>> backward(const Network<T>& net, const ForwardCache<T>& cache,
                                    const Tensor<T>& grad_output, unsigned threads)
{
    const auto& spec = net.spec();
    if (cache.revision != net.revision() || cache.layer_inputs.size() != spec.layers.size() ||
        cache.pre_activations.size() != spec.layers.size()) {
        throw UsageError("forward cache does not belong to this network (stale or mismatched)");
    }
    if (grad_output.shape() != cache.pre_activations.back().shape()) {
        throw DimensionError("output gradient " + to_string(grad_output.shape()) +
                             " does not match network output " + to_string(cache.pre_activations.back().shape()));
    }

    std::vector<ConvParams<T>> grads = zero_gradients(net);
    Tensor<T> upstream = grad_output;
    for (std::size_t n = spec.layers.size(); n-- > 0;) {
        if (spec.layers[n].activation == Activation::relu) {
            upstream = relu_backward(cache.pre_activations[n], upstream);
        }
        auto layer = conv2d_backward(cache.layer_inputs[n], net.params()[n], upstream, threads);
        grads[n] = std::move(layer.params);
        if (n > 0) upstream = std::move(layer.input);
    }
    return grads;
}

#define SKETCHNET_INSTANTIATE_NETWORK(T)                                                                     \
    template class Network<T>;                                                                               \
    template Network<T> init_network<T>(const NetworkSpec&, std::uint64_t);                                  \
    template ForwardResult<T> forward<T>(const Network<T>&, const Tensor<T>&, unsigned);                     \
    template Tensor<T> predict<T>(const Network<T>&, const Tensor<T>&, unsigned);                            \
    template std::vector<ConvParams<T>> zero_gradients<T>(const Network<T>&);                                \
    template std::vector<ConvParams<T>> backward<T>(const Network<T>&, const ForwardCache<T>&, const Tensor<T>&, \
                                                    unsigned);

SKETCHNET_INSTANTIATE_NETWORK(float)
SKETCHNET_INSTANTIATE_NETWORK(double)

template Network<double> Network<float>::cast<double>() const;
template Network<float> Network<double>::cast<float>() const;
template Network<float> Network<float>::cast<float>() const;
template Network<double> Network<double>::cast<double>() const;

#undef SKETCHNET_INSTANTIATE_NETWORK

}  // namespace sketchnet
