#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketchnet::cli {

/// Bad command-line input; reported with exit code 2 before any compute.
class UsageFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SynthOptions {
    std::uint64_t seed = 0;
    long long count = 0;
    std::string out_dir;
};

/// Flags shared by every command that trains a model.
struct TrainOptions {
    std::string arch = "medium";
    long long iterations = 1000;
    double learning_rate = 1e-11;
    double alpha = 1e4;
    double lambda = 1e9;
    long long batch = 8;
    std::uint64_t seed = 0;
    bool no_xy = false;
    bool no_align = false;
    std::string crop;  ///< "HxW", empty for full size
    unsigned threads = 1;
};

struct TrainCommand {
    std::string manifest;
    TrainOptions train;
    std::string out_model;
    std::string log;
    long long checkpoint_every = 0;
};

struct GenerateCommand {
    std::string model;
    std::string photo;
    std::string out;
    std::string eyes;  ///< "lx,ly,rx,ry"
    bool timing = false;
    unsigned threads = 1;
};

struct EvaluateCommand {
    std::string model;
    std::string manifest;
    std::string ranks = "1,3,5,10";
    std::string report;
    std::string crop;
    bool baseline_grayscale = false;
    bool identity_gallery = false;
    bool no_align = false;
    unsigned threads = 1;
};

struct AblateCommand {
    std::string manifest;
    std::string eval_manifest;
    std::string subset_sizes = "5,27,44,88";
    bool with_alpha = false;
    bool without_alpha = false;
    TrainOptions train;
    std::string report;
};

int run_synth(const SynthOptions& opts);
int run_train(const TrainCommand& cmd);
int run_generate(const GenerateCommand& cmd);
int run_evaluate(const EvaluateCommand& cmd);
int run_ablate(const AblateCommand& cmd);

/// "1,3,5" -> {1, 3, 5}; throws UsageFailure on anything else.
std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& flag);

/// "41x41" -> (41, 41); empty -> nullopt.
std::optional<std::pair<std::size_t, std::size_t>> parse_crop(const std::string& text);

}  // namespace sketchnet::cli
