#include "sketchnet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "sketchnet/loss.hpp"
#include "sketchnet/ops.hpp"

namespace sketchnet {

double prl(const TensorF& gt, const TensorF& pred)
{
    if (gt.shape() != pred.shape() || gt.channels() != 1) {
        throw DimensionError("PRL needs two single-channel images of equal size, got " + to_string(gt.shape()) +
                             " and " + to_string(pred.shape()));
    }
    const double pixels = static_cast<double>(gt.width()) * static_cast<double>(gt.height());
    return std::sqrt(pair_sqdist(gt, pred)) / pixels;
}

std::array<double, 3> mprl(const TensorF& gt, const TensorF& pred)
{
    if (gt.shape() != pred.shape()) {
        throw DimensionError("MPRL needs equal shapes, got " + to_string(gt.shape()) + " and " +
                             to_string(pred.shape()));
    }
    std::array<double, 3> out{};
    for (std::size_t s = 0; s < kMprlScales.size(); ++s) {
        out[s] = prl(resize_bilinear(gt, kMprlScales[s]), resize_bilinear(pred, kMprlScales[s]));
    }
    return out;
}

double verification_distance(const TensorF& query_sketch, const TensorF& pseudo_sketch)
{
    return pair_sqdist(query_sketch, pseudo_sketch);
}

CmsReport cms(const std::vector<LabeledImage>& queries, const std::vector<LabeledImage>& gallery,
              const std::vector<std::size_t>& ranks)
{
    if (queries.empty() || gallery.empty()) throw ArgumentError("CMS needs at least one query and one gallery entry");
    std::map<std::string, std::size_t> gallery_index;
    for (std::size_t g = 0; g < gallery.size(); ++g) {
        if (!gallery_index.emplace(gallery[g].identity, g).second) {
            throw ArgumentError("identity '" + gallery[g].identity + "' appears more than once in the gallery");
        }
    }
    for (std::size_t r : ranks) {
        if (r == 0 || r > gallery.size()) {
            throw ArgumentError("rank " + std::to_string(r) + " outside 1.." + std::to_string(gallery.size()));
        }
    }

    // hits[n] counts queries whose identity sits at 0-based position n.
    std::vector<std::size_t> hits(gallery.size(), 0);
    std::vector<double> distance(gallery.size());
    std::vector<std::size_t> order(gallery.size());
    for (const auto& query : queries) {
        const auto found = gallery_index.find(query.identity);
        if (found == gallery_index.end()) {
            throw ArgumentError("query identity '" + query.identity + "' is missing from the gallery");
        }
        for (std::size_t g = 0; g < gallery.size(); ++g) {
            distance[g] = verification_distance(query.image, gallery[g].image);
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return distance[a] < distance[b]; });
        const auto position = std::find(order.begin(), order.end(), found->second) - order.begin();
        ++hits[static_cast<std::size_t>(position)];
    }

    CmsReport report{ranks, {}, gallery.size()};
    for (std::size_t r : ranks) {
        const auto within = std::accumulate(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(r), std::size_t{0});
        report.scores.push_back(100.0 * static_cast<double>(within) / static_cast<double>(queries.size()));
    }
    return report;
}

std::vector<LabeledImage> generate_gallery(const Network<float>& net, const Dataset& test_set, unsigned threads)
{
    const bool with_xy = net.spec().in_channels == 5;
    if (net.spec().in_channels != 3 && !with_xy) {
        throw ArgumentError("photo networks take 3 or 5 input channels, this one takes " +
                            std::to_string(net.spec().in_channels));
    }
    std::vector<LabeledImage> gallery;
    gallery.reserve(test_set.size());
    for (const auto& pair : test_set.pairs) {
        gallery.push_back({predict(net, network_input(pair.photo, with_xy), threads), pair.identity});
    }
    return gallery;
}

std::vector<LabeledImage> query_sketches(const Dataset& test_set, std::size_t height, std::size_t width)
{
    std::vector<LabeledImage> queries;
    queries.reserve(test_set.size());
    for (const auto& pair : test_set.pairs) {
        queries.push_back({crop_center(pair.sketch, height, width), pair.identity});
    }
    return queries;
}

CmsReport evaluate_verification(const Network<float>& net, const Dataset& test_set,
                                const std::vector<std::size_t>& ranks, unsigned threads)
{
    auto gallery = generate_gallery(net, test_set, threads);
    if (gallery.empty()) throw ArgumentError("test set is empty");
    const auto& out = gallery.front().image;
    return cms(query_sketches(test_set, out.height(), out.width()), gallery, ranks);
}

std::vector<LabeledImage> grayscale_gallery(const Dataset& test_set)
{
    std::vector<LabeledImage> gallery;
    gallery.reserve(test_set.size());
    for (const auto& pair : test_set.pairs) {
        gallery.push_back(
            {crop_center(to_grayscale(pair.photo), pair.sketch.height(), pair.sketch.width()), pair.identity});
    }
    return gallery;
}

MprlReport mprl_report(const std::vector<LabeledImage>& ground_truth, const std::vector<LabeledImage>& predictions)
{
    if (ground_truth.size() != predictions.size() || ground_truth.empty()) {
        throw ArgumentError("MPRL needs matching, non-empty ground-truth and prediction lists");
    }
    MprlReport report;
    for (std::size_t n = 0; n < ground_truth.size(); ++n) {
        const auto values = mprl(ground_truth[n].image, predictions[n].image);
        report.pairs.push_back({ground_truth[n].identity, values});
        for (std::size_t s = 0; s < values.size(); ++s) report.mean[s] += values[s];
    }
    for (auto& m : report.mean) m /= static_cast<double>(ground_truth.size());
    return report;
}

void write_cms_csv(std::ostream& out, const CmsReport& report)
{
    out << "rank,score\n";
    for (std::size_t n = 0; n < report.ranks.size(); ++n) out << report.ranks[n] << ',' << report.scores[n] << '\n';
}

void write_mprl_means_csv(std::ostream& out, const MprlReport& report)
{
    out << "scale,mean_prl\n";
    for (std::size_t s = 0; s < kMprlScales.size(); ++s) out << kMprlScales[s] << ',' << report.mean[s] << '\n';
}

void write_mprl_pairs_csv(std::ostream& out, const MprlReport& report)
{
    out << "identity,prl_0.5,prl_1,prl_2\n";
    for (const auto& entry : report.pairs) {
        out << entry.identity << ',' << entry.prl[0] << ',' << entry.prl[1] << ',' << entry.prl[2] << '\n';
    }
}

}  // namespace sketchnet
