#include "sketchnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "sketchnet/image_io.hpp"

namespace sketchnet {

void Dataset::validate() const
{
    std::set<std::string> seen;
    for (const auto& pair : pairs) {
        if (pair.identity.empty()) throw ArgumentError("dataset contains a pair without an identity");
        if (!seen.insert(pair.identity).second) {
            throw ArgumentError("identity '" + pair.identity + "' appears more than once in the split");
        }
        if (pair.photo.channels() != 3 || pair.sketch.channels() != 1) {
            throw DimensionError("pair '" + pair.identity + "' needs a 3-channel photo and 1-channel sketch, got " +
                                 to_string(pair.photo.shape()) + " and " + to_string(pair.sketch.shape()));
        }
        const auto& p = pair.photo.shape();
        const auto& s = pair.sketch.shape();
        if (s.height > p.height || s.width > p.width || p.height - s.height != p.width - s.width ||
            (p.height - s.height) % 2 != 0) {
            throw DimensionError("pair '" + pair.identity + "': sketch " + to_string(s) +
                                 " is not a centred, evenly shrunk window of photo " + to_string(p));
        }
        for (const TensorF* t : {&pair.photo, &pair.sketch}) {
            for (float v : t->data()) {
                if (!(v >= 0.0f && v <= 255.0f)) {
                    throw ArgumentError("pair '" + pair.identity + "' has pixel values outside [0, 255]");
                }
            }
        }
    }
}

Dataset take_subset(const Dataset& dataset, std::size_t count)
{
    if (count > dataset.size()) {
        throw ArgumentError("subset of " + std::to_string(count) + " requested from " +
                            std::to_string(dataset.size()) + " pairs");
    }
    Dataset out{{dataset.pairs.begin(), dataset.pairs.begin() + static_cast<std::ptrdiff_t>(count)}, dataset.split};
    return out;
}

Dataset crop_dataset(const Dataset& dataset, std::size_t photo_h, std::size_t photo_w, std::size_t net_shrink)
{
    if (net_shrink % 2 != 0 || photo_h <= net_shrink || photo_w <= net_shrink) {
        throw ArgumentError("crop " + std::to_string(photo_h) + "x" + std::to_string(photo_w) +
                            " is incompatible with a network shrink of " + std::to_string(net_shrink));
    }
    Dataset out{{}, dataset.split};
    out.pairs.reserve(dataset.size());
    for (const auto& pair : dataset.pairs) {
        const auto& p = pair.photo;
        if (photo_h > p.height() || photo_w > p.width()) {
            throw DimensionError("crop " + std::to_string(photo_h) + "x" + std::to_string(photo_w) +
                                 " exceeds photo " + to_string(p.shape()));
        }
        const std::size_t top = (p.height() - photo_h) / 2;
        const std::size_t left = (p.width() - photo_w) / 2;
        const std::size_t margin = pair.shrink() / 2;
        if (top + net_shrink / 2 < margin || left + net_shrink / 2 < margin) {
            throw DimensionError("crop window of pair '" + pair.identity + "' reaches outside the sketch");
        }
        out.pairs.push_back({crop(p, top, left, photo_h, photo_w),
                             crop(pair.sketch, top + net_shrink / 2 - margin, left + net_shrink / 2 - margin,
                                  photo_h - net_shrink, photo_w - net_shrink),
                             pair.identity});
    }
    return out;
}

TensorF network_input(const TensorF& photo, bool with_xy)
{
    return with_xy ? add_xy_channels(photo) : photo;
}

TensorF render_synthetic_sketch(const TensorF& photo, std::size_t margin)
{
    if (margin == 0 || 2 * margin >= photo.height() || 2 * margin >= photo.width()) {
        throw ArgumentError("sketch margin " + std::to_string(margin) + " does not fit photo " +
                            to_string(photo.shape()));
    }
    const TensorD gray = to_grayscale(photo.cast<double>());
    const std::size_t h = photo.height() - 2 * margin;
    const std::size_t w = photo.width() - 2 * margin;
    TensorF sketch(Shape{1, h, w});
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t y = i + margin;
            const std::size_t x = j + margin;
            double box = 0.0;
            for (std::size_t u = y - 1; u <= y + 1; ++u) {
                for (std::size_t v = x - 1; v <= x + 1; ++v) box += gray(0, u, v);
            }
            box /= 9.0;
            const double g = gray(0, y, x);
            const double tone = 0.75 * g + 64.0 + 4.0 * (g - box);
            sketch(0, i, j) = static_cast<float>(std::nearbyint(std::clamp(tone, 0.0, 255.0)));
        }
    }
    return sketch;
}

namespace {

TensorF synth_photo(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    const double h = static_cast<double>(kPhotoHeight);
    const double w = static_cast<double>(kPhotoWidth);

    std::vector<double> canvas(3 * kPhotoHeight * kPhotoWidth);
    auto at = [&](std::size_t c, std::size_t i, std::size_t j) -> double& {
        return canvas[(c * kPhotoHeight + i) * kPhotoWidth + j];
    };

    double base[3];
    for (double& b : base) b = uniform(60.0, 200.0);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < kPhotoHeight; ++i) {
            for (std::size_t j = 0; j < kPhotoWidth; ++j) at(c, i, j) = base[c];
        }
    }

    // Smooth blobs.
    for (int blob = 0; blob < 6; ++blob) {
        const double cy = uniform(0.0, h);
        const double cx = uniform(0.0, w);
        const double sigma = uniform(12.0, 40.0);
        double amp[3];
        for (double& a : amp) a = uniform(-90.0, 90.0);
        for (std::size_t i = 0; i < kPhotoHeight; ++i) {
            for (std::size_t j = 0; j < kPhotoWidth; ++j) {
                const double dy = static_cast<double>(i) - cy;
                const double dx = static_cast<double>(j) - cx;
                const double g = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
                for (std::size_t c = 0; c < 3; ++c) at(c, i, j) += amp[c] * g;
            }
        }
    }

    // Identity-specific hard-edged shapes: ellipses and rectangles. The first
    // three sit in the central band, like facial features on an aligned face.
    for (int shape = 0; shape < 5; ++shape) {
        const bool ellipse = unit(rng) < 0.5;
        const double spread = shape < 3 ? 0.2 : 0.35;
        const double cy = uniform((0.5 - spread) * h, (0.5 + spread) * h);
        const double cx = uniform((0.5 - spread) * w, (0.5 + spread) * w);
        const double ry = uniform(6.0, 25.0);
        const double rx = uniform(6.0, 25.0);
        double colour[3];
        for (double& v : colour) v = uniform(0.0, 255.0);
        for (std::size_t i = 0; i < kPhotoHeight; ++i) {
            for (std::size_t j = 0; j < kPhotoWidth; ++j) {
                const double dy = (static_cast<double>(i) - cy) / ry;
                const double dx = (static_cast<double>(j) - cx) / rx;
                const bool hit = ellipse ? dy * dy + dx * dx <= 1.0 : std::abs(dy) <= 1.0 && std::abs(dx) <= 1.0;
                if (!hit) continue;
                for (std::size_t c = 0; c < 3; ++c) at(c, i, j) = colour[c];
            }
        }
    }

    TensorF photo(Shape{3, kPhotoHeight, kPhotoWidth});
    auto dst = photo.data();
    for (std::size_t n = 0; n < canvas.size(); ++n) {
        dst[n] = static_cast<float>(std::nearbyint(std::clamp(canvas[n], 0.0, 255.0)));
    }
    return photo;
}

std::string synth_identity(std::size_t index)
{
    std::ostringstream id;
    id << "synth-" << std::setw(4) << std::setfill('0') << index;
    return id.str();
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_coordinate(const std::string& field, const std::string& where)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw CorruptDataError(where + ": bad eye coordinate '" + field + "'");
    }
}

}  // namespace

Dataset synth_pairs(std::uint64_t seed, std::size_t count)
{
    if (count == 0) throw ArgumentError("synth_pairs needs a positive pair count");
    std::mt19937_64 rng(seed);
    Dataset out{{}, Split::train};
    out.pairs.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        TensorF photo = synth_photo(rng);
        TensorF sketch = render_synthetic_sketch(photo, (kPhotoHeight - kSketchHeight) / 2);
        out.pairs.push_back({std::move(photo), std::move(sketch), synth_identity(n + 1)});
    }
    return out;
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw FileNotFoundError(path.string() + ": cannot open manifest");
    const auto base = path.parent_path();
    auto resolve = [&base](const std::string& field) {
        const std::filesystem::path p(field);
        return p.is_absolute() ? p : base / p;
    };

    std::vector<ManifestRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trim(line);
        if (content.empty() || content.front() == '#') continue;

        std::vector<std::string> fields;
        std::stringstream ss(content);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        if (!content.empty() && content.back() == ',') fields.emplace_back();

        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 3 && fields.size() != 7) {
            throw CorruptDataError(where + ": expected 3 or 7 comma-separated fields, got " +
                                   std::to_string(fields.size()));
        }
        if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
            throw CorruptDataError(where + ": empty photo, sketch or identity field");
        }
        ManifestRecord rec;
        rec.photo = resolve(fields[0]);
        rec.sketch = resolve(fields[1]);
        rec.identity = fields[2];
        if (fields.size() == 7) {
            rec.left_eye = Point{parse_coordinate(fields[3], where), parse_coordinate(fields[4], where)};
            rec.right_eye = Point{parse_coordinate(fields[5], where), parse_coordinate(fields[6], where)};
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_manifest(const std::vector<ManifestRecord>& records, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "# photo,sketch,identity[,left_x,left_y,right_x,right_y]\n";
    out << std::setprecision(10);
    for (const auto& rec : records) {
        out << rec.photo.generic_string() << ',' << rec.sketch.generic_string() << ',' << rec.identity;
        if (rec.left_eye && rec.right_eye) {
            out << ',' << rec.left_eye->x << ',' << rec.left_eye->y << ',' << rec.right_eye->x << ','
                << rec.right_eye->y;
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing manifest '" + path.string() + "'");
}

namespace {

TensorF align_if_requested(const TensorF& raw, std::optional<Point> left_eye, std::optional<Point> right_eye)
{
    if (left_eye && right_eye) return align_by_eyes(raw, *left_eye, *right_eye);
    return raw;
}

}  // namespace

TensorF prepare_photo(const TensorF& raw, std::optional<Point> left_eye, std::optional<Point> right_eye)
{
    const TensorF aligned = align_if_requested(to_rgb(raw), left_eye, right_eye);
    return clamp_pixels(crop_center(aligned, kPhotoHeight, kPhotoWidth));
}

TensorF prepare_sketch(const TensorF& raw, std::optional<Point> left_eye, std::optional<Point> right_eye)
{
    TensorF gray = raw.channels() == 3 ? to_grayscale(raw) : raw;
    if (gray.channels() != 1) {
        throw DimensionError("sketch must have 1 or 3 channels, got " + to_string(raw.shape()));
    }
    gray = align_if_requested(gray, left_eye, right_eye);
    if (gray.height() >= kPhotoHeight && gray.width() >= kPhotoWidth) {
        gray = crop_center(gray, kPhotoHeight, kPhotoWidth);
    }
    return clamp_pixels(crop_center(gray, kSketchHeight, kSketchWidth));
}

Dataset load_dataset(const std::filesystem::path& manifest, const LoadOptions& options)
{
    Dataset out{{}, options.split};
    for (const auto& rec : read_manifest(manifest)) {
        std::optional<Point> left;
        std::optional<Point> right;
        if (options.align) {
            left = rec.left_eye;
            right = rec.right_eye;
        }
        out.pairs.push_back({prepare_photo(load_image(rec.photo), left, right),
                             prepare_sketch(load_image(rec.sketch), left, right), rec.identity});
    }
    out.validate();
    return out;
}

}  // namespace sketchnet
