#include "sketchnet/model_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <iterator>
#include <string>

namespace sketchnet {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'K', 'N', 'M'};
constexpr std::uint32_t kMaxExtent = 1u << 16;

std::uint64_t fnv1a(const std::string& bytes, std::size_t length)
{
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t n = 0; n < length; ++n) {
        h ^= static_cast<unsigned char>(bytes[n]);
        h *= 1099511628211ull;
    }
    return h;
}

class Writer {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f32(float v) { put(std::bit_cast<std::uint32_t>(v), 4); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
    void raw(const char* p, std::size_t n) { bytes_.append(p, n); }
    [[nodiscard]] const std::string& bytes() const noexcept { return bytes_; }

private:
    void put(std::uint64_t v, int n)
    {
        for (int b = 0; b < n; ++b) bytes_.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
    }
    std::string bytes_;
};

class Reader {
public:
    Reader(const std::string& bytes, std::size_t end, std::string origin)
        : bytes_(bytes), end_(end), origin_(std::move(origin))
    {
    }

    std::uint64_t get(int n)
    {
        if (pos_ + static_cast<std::size_t>(n) > end_) {
            throw CorruptDataError(origin_ + ": model file is truncated");
        }
        std::uint64_t v = 0;
        for (int b = 0; b < n; ++b) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
        }
        pos_ += static_cast<std::size_t>(n);
        return v;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    double scalar(std::uint32_t width)
    {
        if (width == 4) return std::bit_cast<float>(static_cast<std::uint32_t>(get(4)));
        return std::bit_cast<double>(get(8));
    }
    [[nodiscard]] std::size_t position() const noexcept { return pos_; }

private:
    const std::string& bytes_;
    std::size_t end_;
    std::string origin_;
    std::size_t pos_ = 0;
};

}  // namespace

template <typename T>
void save_model(const Network<T>& net, const std::filesystem::path& path)
{
    Writer w;
    w.raw(kMagic.data(), kMagic.size());
    w.u32(kModelFormatVersion);
    w.u32(sizeof(T));
    w.u32(static_cast<std::uint32_t>(net.spec().in_channels));
    w.u32(static_cast<std::uint32_t>(net.spec().layers.size()));
    for (const auto& layer : net.spec().layers) {
        w.u32(static_cast<std::uint32_t>(layer.kernel_size));
        w.u32(static_cast<std::uint32_t>(layer.out_channels));
        w.u32(layer.activation == Activation::relu ? 0u : 1u);
    }
    for (const auto& p : net.params()) {
        for (auto span : {p.weights(), p.bias()}) {
            for (T v : span) {
                if constexpr (sizeof(T) == 4) {
                    w.f32(v);
                } else {
                    w.f64(v);
                }
            }
        }
    }
    w.u64(fnv1a(w.bytes(), w.bytes().size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw IoError("failed writing model to '" + path.string() + "'");
}

template <typename T>
Network<T> load_model(const std::filesystem::path& path)
{
    const std::string origin = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(origin + ": cannot open model file");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    constexpr std::size_t kHeader = 20;
    if (bytes.size() < kHeader + 8) throw CorruptDataError(origin + ": model file is truncated");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        throw CorruptDataError(origin + ": not a model file (bad magic bytes)");
    }

    Reader header(bytes, bytes.size(), origin);
    header.get(4);
    const std::uint32_t version = header.u32();
    if (version != kModelFormatVersion) {
        throw VersionError(origin + ": model format version " + std::to_string(version) +
                           " is not supported (expected " + std::to_string(kModelFormatVersion) + ")");
    }

    const std::size_t body = bytes.size() - 8;
    std::uint64_t stored = 0;
    for (int b = 0; b < 8; ++b) {
        stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[body + b])) << (8 * b);
    }

    Reader r(bytes, body, origin);
    r.get(8);
    const std::uint32_t width = r.u32();
    if (width != 4 && width != 8) {
        throw CorruptDataError(origin + ": unsupported scalar width " + std::to_string(width));
    }
    NetworkSpec spec;
    spec.in_channels = r.u32();
    if (spec.in_channels > kMaxExtent) throw CorruptDataError(origin + ": implausible input channel count");
    const std::uint32_t layer_count = r.u32();
    if (layer_count == 0 || layer_count > 4096) {
        throw CorruptDataError(origin + ": implausible layer count " + std::to_string(layer_count));
    }
    for (std::uint32_t n = 0; n < layer_count; ++n) {
        LayerSpec layer;
        layer.kernel_size = r.u32();
        layer.out_channels = r.u32();
        const std::uint32_t act = r.u32();
        if (act > 1) throw CorruptDataError(origin + ": unknown activation code " + std::to_string(act));
        layer.activation = act == 0 ? Activation::relu : Activation::none;
        if (layer.kernel_size > kMaxExtent || layer.out_channels > kMaxExtent) {
            throw CorruptDataError(origin + ": implausible layer dimensions");
        }
        spec.layers.push_back(layer);
    }
    try {
        spec.validate();
    } catch (const ArgumentError& e) {
        throw CorruptDataError(origin + ": invalid architecture: " + e.what());
    }

    // Size check before allocating anything the header claims.
    std::size_t expected_scalars = 0;
    std::size_t in_ch = spec.in_channels;
    for (const auto& layer : spec.layers) {
        expected_scalars += layer.out_channels * in_ch * layer.kernel_size * layer.kernel_size + layer.out_channels;
        in_ch = layer.out_channels;
    }
    if (r.position() + expected_scalars * width != body) {
        throw CorruptDataError(origin + ": model file is truncated or has trailing bytes");
    }
    if (fnv1a(bytes, body) != stored) throw CorruptDataError(origin + ": checksum mismatch");

    std::vector<ConvParams<T>> params;
    in_ch = spec.in_channels;
    for (const auto& layer : spec.layers) {
        const std::size_t k = layer.kernel_size;
        std::vector<T> weights(layer.out_channels * in_ch * k * k);
        std::vector<T> bias(layer.out_channels);
        for (auto& v : weights) v = static_cast<T>(r.scalar(width));
        for (auto& v : bias) v = static_cast<T>(r.scalar(width));
        params.emplace_back(layer.out_channels, in_ch, k, k, std::move(weights), std::move(bias));
        in_ch = layer.out_channels;
    }
    return Network<T>(std::move(spec), std::move(params));
}

template void save_model<float>(const Network<float>&, const std::filesystem::path&);
template void save_model<double>(const Network<double>&, const std::filesystem::path&);
template Network<float> load_model<float>(const std::filesystem::path&);
template Network<double> load_model<double>(const std::filesystem::path&);

}  // namespace sketchnet
