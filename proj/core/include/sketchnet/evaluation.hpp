#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "sketchnet/dataset.hpp"
#include "sketchnet/network.hpp"
#include "sketchnet/tensor.hpp"

namespace sketchnet {

/// Pixel-wise reconstruction loss: sqrt(sum (gt - pred)^2) / (W * H).
/// The normaliser sits outside the square root.
double prl(const TensorF& gt, const TensorF& pred);

inline constexpr std::array<double, 3> kMprlScales{0.5, 1.0, 2.0};

/// prl after bilinearly resizing both images to each of kMprlScales.
std::array<double, 3> mprl(const TensorF& gt, const TensorF& pred);

/// Squared distance between a drawn query sketch and a generated pseudo-sketch.
double verification_distance(const TensorF& query_sketch, const TensorF& pseudo_sketch);

struct LabeledImage {
    TensorF image;
    std::string identity;
};

struct CmsReport {
    std::vector<std::size_t> ranks;
    std::vector<double> scores;  ///< percent of queries matched within each rank
    std::size_t gallery_size = 0;
};

/// Cumulative match score. Each query ranks the gallery by ascending
/// verification_distance (ties keep gallery order) and counts as a hit at
/// rank n when its own identity is among the first n entries.
CmsReport cms(const std::vector<LabeledImage>& queries, const std::vector<LabeledImage>& gallery,
              const std::vector<std::size_t>& ranks);

/// Pseudo-sketch of every test photo through the network. Drawn sketches
/// larger than the output are centre-cropped to match.
std::vector<LabeledImage> generate_gallery(const Network<float>& net, const Dataset& test_set, unsigned threads = 1);

/// Drawn sketches of a dataset, cropped to `height` x `width` when larger.
std::vector<LabeledImage> query_sketches(const Dataset& test_set, std::size_t height, std::size_t width);

/// Generates pseudo-sketches for the test photos and scores the drawn
/// sketches against them.
CmsReport evaluate_verification(const Network<float>& net, const Dataset& test_set,
                                const std::vector<std::size_t>& ranks, unsigned threads = 1);

/// Grayscale photos, cropped to the sketch window, standing in for generated sketches.
std::vector<LabeledImage> grayscale_gallery(const Dataset& test_set);

struct MprlEntry {
    std::string identity;
    std::array<double, 3> prl{};
};

struct MprlReport {
    std::vector<MprlEntry> pairs;
    std::array<double, 3> mean{};
};

/// MPRL of matched (ground truth, prediction) lists, paired by position.
MprlReport mprl_report(const std::vector<LabeledImage>& ground_truth, const std::vector<LabeledImage>& predictions);

/// "rank,score" header then one line per rank.
void write_cms_csv(std::ostream& out, const CmsReport& report);
/// "scale,mean_prl" header then one line per scale.
void write_mprl_means_csv(std::ostream& out, const MprlReport& report);
/// "identity,prl_0.5,prl_1,prl_2" header then one line per pair.
void write_mprl_pairs_csv(std::ostream& out, const MprlReport& report);

}  // namespace sketchnet
