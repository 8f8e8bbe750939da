#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sketchnet/preprocess.hpp"
#include "sketchnet/tensor.hpp"

namespace sketchnet {

/// An aligned photo (3 x H x W) and its drawn sketch (1 x h x w).
///
/// The sketch covers the centred window of the photo left after an even,
/// equal shrink on both axes: 3x200x155 with 1x188x143 after the standard
/// pipeline.
struct PhotoSketchPair {
    TensorF photo;
    TensorF sketch;
    std::string identity;

    /// Margin between photo and sketch on each axis (12 for the standard pipeline).
    [[nodiscard]] std::size_t shrink() const noexcept { return photo.height() - sketch.height(); }
};

enum class Split { train, test };

struct Dataset {
    std::vector<PhotoSketchPair> pairs;
    Split split = Split::train;

    /// Throws ArgumentError/DimensionError on duplicate identities, wrong
    /// channel counts, misaligned sketch frames or pixels outside [0, 255].
    void validate() const;

    [[nodiscard]] std::size_t size() const noexcept { return pairs.size(); }
};

/// First `count` pairs, preserving order.
Dataset take_subset(const Dataset& dataset, std::size_t count);

/// Crops every photo to a centred photo_h x photo_w window and the sketch to
/// the (photo_h - net_shrink) x (photo_w - net_shrink) region a network with
/// that total shrink produces for the cropped photo.
Dataset crop_dataset(const Dataset& dataset, std::size_t photo_h, std::size_t photo_w, std::size_t net_shrink);

/// Network input for a photo: RGB plus XY channels when `with_xy`.
TensorF network_input(const TensorF& photo, bool with_xy);

/// Synthetic sketch rendering used by synth_pairs: grayscale, unsharp edge
/// emphasis over a 3x3 box, tone mapping toward paper white, then a centred
/// crop that removes `margin` pixels from every border. Values are rounded
/// to integers and clamped to [0, 255].
TensorF render_synthetic_sketch(const TensorF& photo, std::size_t margin = 6);

/// `count` deterministic pairs of procedurally generated 3x200x155 photos
/// (smooth colour blobs plus identity-specific hard-edged shapes) and their
/// 1x188x143 rendered sketches, labelled "synth-0001", "synth-0002", ...
Dataset synth_pairs(std::uint64_t seed, std::size_t count);

/// One line of a dataset manifest:
///
///   photo_path,sketch_path,identity[,left_x,left_y,right_x,right_y]
///
/// Blank lines and lines starting with '#' are ignored. Relative paths are
/// resolved against the manifest's directory. Eye coordinates, when present,
/// apply to both images.
struct ManifestRecord {
    std::filesystem::path photo;
    std::filesystem::path sketch;
    std::string identity;
    std::optional<Point> left_eye;
    std::optional<Point> right_eye;
};

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<ManifestRecord>& records, const std::filesystem::path& path);

struct LoadOptions {
    bool align = true;  ///< use manifest eye coordinates when present
    Split split = Split::train;
};

/// Runs the preprocessing pipeline on a raw photo: optional eye alignment
/// to 250x200, then a centred 200x155 crop. Grayscale input is replicated to RGB.
TensorF prepare_photo(const TensorF& raw, std::optional<Point> left_eye = {}, std::optional<Point> right_eye = {});

/// Same geometry for a drawn sketch, ending at 1x188x143.
TensorF prepare_sketch(const TensorF& raw, std::optional<Point> left_eye = {}, std::optional<Point> right_eye = {});

Dataset load_dataset(const std::filesystem::path& manifest, const LoadOptions& options = {});

}  // namespace sketchnet
