#include "sketchnet/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace sketchnet {

namespace {

class PnmHeaderParser {
public:
    PnmHeaderParser(const std::string& bytes, std::string origin) : bytes_(bytes), origin_(std::move(origin)) {}

    std::size_t number()
    {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            throw CorruptDataError(origin_ + ": malformed PNM header");
        }
        std::size_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
            if (value > (1u << 24)) throw CorruptDataError(origin_ + ": PNM header value out of range");
            ++pos_;
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_start()
    {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            throw CorruptDataError(origin_ + ": malformed PNM header");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            const char ch = bytes_[pos_];
            if (ch == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& bytes_;
    std::string origin_;
    std::size_t pos_ = 2;
};

}  // namespace

TensorF load_image(const std::filesystem::path& path)
{
    const std::string origin = path.string();
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) throw FileNotFoundError(origin + ": no such image file");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(origin + ": cannot open image file");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 2) throw CorruptDataError(origin + ": empty or truncated image file");
    if (bytes[0] != 'P') throw UnsupportedFormatError(origin + ": not a PGM/PPM file");
    std::size_t channels = 0;
    if (bytes[1] == '5') {
        channels = 1;
    } else if (bytes[1] == '6') {
        channels = 3;
    } else {
        throw UnsupportedFormatError(origin + ": only binary PGM (P5) and PPM (P6) are supported");
    }

    PnmHeaderParser header(bytes, origin);
    const std::size_t width = header.number();
    const std::size_t height = header.number();
    const std::size_t maxval = header.number();
    if (width == 0 || height == 0) throw CorruptDataError(origin + ": zero image dimension");
    if (maxval == 0 || maxval > 65535) throw CorruptDataError(origin + ": invalid maxval " + std::to_string(maxval));
    const std::size_t start = header.raster_start();

    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    const std::size_t samples = width * height * channels;
    if (bytes.size() < start + samples * sample_bytes) {
        throw CorruptDataError(origin + ": raster is truncated");
    }

    TensorF image(Shape{channels, height, width});
    const double scale = 255.0 / static_cast<double>(maxval);
    std::size_t p = start;
    for (std::size_t i = 0; i < height; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            for (std::size_t c = 0; c < channels; ++c) {
                std::size_t v = static_cast<unsigned char>(bytes[p++]);
                if (sample_bytes == 2) v = (v << 8) | static_cast<unsigned char>(bytes[p++]);
                if (v > maxval) throw CorruptDataError(origin + ": sample exceeds maxval");
                image(c, i, j) = maxval == 255 ? static_cast<float>(v) : static_cast<float>(v * scale);
            }
        }
    }
    return image;
}

unsigned char to_byte(float value) noexcept
{
    if (!(value > 0.0f)) return 0;
    if (value >= 255.0f) return 255;
    // nearbyint honours the current rounding mode, which defaults to nearest-even.
    return static_cast<unsigned char>(std::nearbyint(value));
}

void save_image(const TensorF& image, const std::filesystem::path& path)
{
    const std::size_t channels = image.channels();
    if (channels != 1 && channels != 3) {
        throw DimensionError("only 1- or 3-channel images can be written, got " + to_string(image.shape()));
    }
    std::string out = (channels == 1 ? "P5\n" : "P6\n") + std::to_string(image.width()) + " " +
                      std::to_string(image.height()) + "\n255\n";
    out.reserve(out.size() + image.size());
    for (std::size_t i = 0; i < image.height(); ++i) {
        for (std::size_t j = 0; j < image.width(); ++j) {
            for (std::size_t c = 0; c < channels; ++c) out.push_back(static_cast<char>(to_byte(image(c, i, j))));
        }
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw IoError("failed writing image '" + path.string() + "'");
}

}  // namespace sketchnet
