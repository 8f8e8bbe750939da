#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sketchnet/sketchnet.hpp"

namespace sketchnet::cli {

namespace fs = std::filesystem;

namespace {

std::string exact(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string brief(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

/// Output stream that is either a file or stdout.
class ReportSink {
public:
    explicit ReportSink(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path, std::ios::trunc);
            if (!file_) throw IoError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    void finish(const std::string& path)
    {
        stream().flush();
        if (!stream()) throw IoError("failed writing '" + (path.empty() ? std::string("stdout") : path) + "'");
    }

private:
    std::ofstream file_;
};

void require_file(const std::string& path, const std::string& flag)
{
    std::error_code ec;
    if (path.empty()) throw UsageFailure(flag + " is required");
    if (!fs::is_regular_file(path, ec)) throw UsageFailure(flag + ": no such file '" + path + "'");
}

void require_positive(long long value, const std::string& flag)
{
    if (value <= 0) throw UsageFailure(flag + " must be positive, got " + std::to_string(value));
}

NetworkSpec resolve_spec(const TrainOptions& opts)
{
    try {
        return resolve_architecture(opts.arch, opts.no_xy ? 3 : 5);
    } catch (const std::exception& e) {
        throw UsageFailure(std::string("--arch: ") + e.what());
    }
}

/// Reads the manifest only far enough to count records.
std::size_t manifest_size(const std::string& manifest)
{
    try {
        return read_manifest(manifest).size();
    } catch (const LoadError& e) {
        throw UsageFailure(std::string("--manifest: ") + e.what());
    }
}

TrainConfig make_config(const TrainOptions& opts, std::size_t dataset_size)
{
    require_positive(opts.iterations, "--iters");
    require_positive(opts.batch, "--batch");
    TrainConfig cfg;
    cfg.learning_rate = opts.learning_rate;
    cfg.iterations = static_cast<std::size_t>(opts.iterations);
    cfg.batch_size = static_cast<std::size_t>(opts.batch);
    cfg.loss = LossConfig{opts.alpha, opts.lambda};
    cfg.seed = opts.seed;
    cfg.threads = std::max(1u, opts.threads);
    try {
        cfg.validate(dataset_size);
    } catch (const ArgumentError& e) {
        throw UsageFailure(e.what());
    }
    return cfg;
}

std::optional<std::pair<std::size_t, std::size_t>> checked_crop(const std::string& crop, const NetworkSpec* spec)
{
    auto window = parse_crop(crop);
    if (window && spec && (window->first <= spec->total_shrink() || window->second <= spec->total_shrink())) {
        throw UsageFailure("--crop " + crop + " is too small for a network of shrink " +
                           std::to_string(spec->total_shrink()));
    }
    return window;
}

Dataset load_pairs(const std::string& manifest, bool no_align, const std::optional<std::pair<std::size_t, std::size_t>>& window,
                   std::size_t shrink, Split split)
{
    Dataset data = load_dataset(manifest, LoadOptions{!no_align, split});
    if (window) data = crop_dataset(data, window->first, window->second, shrink);
    return data;
}

std::vector<Point> parse_eyes(const std::string& text)
{
    std::vector<Point> eyes;
    if (text.empty()) return eyes;
    std::vector<double> values;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(field, &used));
            if (used != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception&) {
            throw UsageFailure("--eyes expects four numbers lx,ly,rx,ry");
        }
    }
    if (values.size() != 4) throw UsageFailure("--eyes expects four numbers lx,ly,rx,ry");
    eyes.push_back({values[0], values[1]});
    eyes.push_back({values[2], values[3]});
    return eyes;
}

}  // namespace

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& flag)
{
    std::vector<std::size_t> values;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(field, &used);
            if (used != field.size() || v <= 0) throw std::invalid_argument(field);
            values.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw UsageFailure(flag + ": expected comma-separated positive integers, got '" + text + "'");
        }
    }
    if (values.empty()) throw UsageFailure(flag + " must list at least one value");
    return values;
}

std::optional<std::pair<std::size_t, std::size_t>> parse_crop(const std::string& text)
{
    if (text.empty()) return std::nullopt;
    const auto x = text.find('x');
    if (x == std::string::npos) throw UsageFailure("--crop expects HxW, got '" + text + "'");
    const auto h = parse_size_list(text.substr(0, x), "--crop");
    const auto w = parse_size_list(text.substr(x + 1), "--crop");
    if (h.size() != 1 || w.size() != 1) throw UsageFailure("--crop expects HxW, got '" + text + "'");
    return std::make_pair(h.front(), w.front());
}

int run_synth(const SynthOptions& opts)
{
    if (opts.count <= 0) throw UsageFailure("--count must be at least 1, got " + std::to_string(opts.count));
    if (opts.out_dir.empty()) throw UsageFailure("--out-dir is required");

    const fs::path root(opts.out_dir);
    std::error_code ec;
    fs::create_directories(root / "photos", ec);
    if (ec) throw IoError("cannot create '" + (root / "photos").string() + "': " + ec.message());
    fs::create_directories(root / "sketches", ec);
    if (ec) throw IoError("cannot create '" + (root / "sketches").string() + "': " + ec.message());

    const Dataset data = synth_pairs(opts.seed, static_cast<std::size_t>(opts.count));
    std::vector<ManifestRecord> records;
    for (const auto& pair : data.pairs) {
        const fs::path photo = fs::path("photos") / (pair.identity + ".ppm");
        const fs::path sketch = fs::path("sketches") / (pair.identity + ".pgm");
        save_image(pair.photo, root / photo);
        save_image(pair.sketch, root / sketch);
        records.push_back({photo, sketch, pair.identity, std::nullopt, std::nullopt});
    }
    write_manifest(records, root / "manifest.csv");
    std::cout << "wrote " << records.size() << " pairs to " << root.string() << '\n';
    return 0;
}

int run_train(const TrainCommand& cmd)
{
    require_file(cmd.manifest, "--manifest");
    if (cmd.out_model.empty()) throw UsageFailure("--out-model is required");
    if (cmd.checkpoint_every < 0) throw UsageFailure("--checkpoint-every must be non-negative");
    const NetworkSpec spec = resolve_spec(cmd.train);
    const auto window = checked_crop(cmd.train.crop, &spec);
    TrainConfig cfg = make_config(cmd.train, manifest_size(cmd.manifest));
    if (cmd.checkpoint_every > 0) {
        cfg.checkpoint_every = static_cast<std::size_t>(cmd.checkpoint_every);
        cfg.checkpoint_path = cmd.out_model + ".ckpt";
    }

    const Dataset data = load_pairs(cmd.manifest, cmd.train.no_align, window, spec.total_shrink(), Split::train);

    std::ofstream log;
    if (!cmd.log.empty()) {
        log.open(cmd.log, std::ios::trunc);
        if (!log) throw IoError("cannot open log '" + cmd.log + "'");
        log << "# alpha=" << brief(cfg.loss.alpha) << " lambda=" << brief(cfg.loss.lambda)
            << " lr=" << brief(cfg.learning_rate) << " batch=" << cfg.batch_size << " iters=" << cfg.iterations
            << " seed=" << cfg.seed << " arch=" << cmd.train.arch << " xy=" << (cmd.train.no_xy ? "off" : "on")
            << '\n';
        log << "iter,L_gen,L_discrim,L_total\n";
    }
    auto observer = [&log](const IterationRecord& r) {
        if (log.is_open()) {
            log << r.iteration << ',' << exact(r.generative) << ',' << exact(r.discriminative) << ','
                << exact(r.total) << '\n';
        }
    };
    const auto result = train(data, spec, cfg, observer);
    save_model(result.net, cmd.out_model);
    if (log.is_open() && !log.flush()) throw IoError("failed writing log '" + cmd.log + "'");
    const auto& last = result.history.back();
    std::cout << "trained " << cfg.iterations << " iterations, final L_total=" << exact(last.total) << '\n';
    return 0;
}

int run_generate(const GenerateCommand& cmd)
{
    require_file(cmd.model, "--model");
    require_file(cmd.photo, "--photo");
    if (cmd.out.empty()) throw UsageFailure("--out is required");
    const auto eyes = parse_eyes(cmd.eyes);

    const Network<float> net = load_model<float>(cmd.model);
    if (net.spec().in_channels != 3 && net.spec().in_channels != 5) {
        throw ArgumentError("model takes " + std::to_string(net.spec().in_channels) +
                            " input channels; photo models take 3 or 5");
    }
    const TensorF raw = to_rgb(load_image(cmd.photo));
    TensorF photo = raw;
    if (!eyes.empty()) {
        photo = prepare_photo(raw, eyes[0], eyes[1]);
    } else if (raw.height() >= kPhotoHeight && raw.width() >= kPhotoWidth) {
        photo = prepare_photo(raw);
    }

    const TensorF input = network_input(photo, net.spec().in_channels == 5);
    const auto start = std::chrono::steady_clock::now();
    TensorF sketch;
    try {
        sketch = predict(net, input, std::max(1u, cmd.threads));
    } catch (const DimensionError& e) {
        throw DimensionError(std::string(e.what()) + " (expected a " + std::to_string(kPhotoHeight) + "x" +
                             std::to_string(kPhotoWidth) + " HxW photo)");
    }
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    save_image(clamp_pixels(std::move(sketch)), cmd.out);
    if (cmd.timing) std::cout << "forward_ms," << elapsed.count() << '\n';
    return 0;
}

int run_evaluate(const EvaluateCommand& cmd)
{
    require_file(cmd.manifest, "--manifest");
    const int modes = (cmd.model.empty() ? 0 : 1) + (cmd.baseline_grayscale ? 1 : 0) + (cmd.identity_gallery ? 1 : 0);
    if (modes != 1) {
        throw UsageFailure("choose exactly one of --model, --baseline-grayscale, --identity-gallery");
    }
    if (!cmd.model.empty()) require_file(cmd.model, "--model");
    const auto ranks = parse_size_list(cmd.ranks, "--ranks");
    const std::size_t count = manifest_size(cmd.manifest);
    for (std::size_t r : ranks) {
        if (r > count) {
            throw UsageFailure("--ranks: rank " + std::to_string(r) + " exceeds the gallery size " +
                               std::to_string(count));
        }
    }

    std::optional<Network<float>> net;
    if (!cmd.model.empty()) net = load_model<float>(cmd.model);
    const auto window = checked_crop(cmd.crop, net ? &net->spec() : nullptr);
    const std::size_t shrink = net ? net->spec().total_shrink() : 0;
    if (window && !net) throw UsageFailure("--crop needs --model (it depends on the network shrink)");

    const Dataset test = load_pairs(cmd.manifest, cmd.no_align, window, shrink, Split::test);
    std::vector<LabeledImage> gallery;
    if (net) {
        gallery = generate_gallery(*net, test, std::max(1u, cmd.threads));
    } else if (cmd.baseline_grayscale) {
        gallery = grayscale_gallery(test);
    }
    const auto& out_img = gallery.empty() ? test.pairs.front().sketch : gallery.front().image;
    const auto queries = query_sketches(test, out_img.height(), out_img.width());
    if (cmd.identity_gallery) gallery = queries;

    const CmsReport report = cms(queries, gallery, ranks);
    const MprlReport mprl = mprl_report(queries, gallery);

    ReportSink sink(cmd.report);
    auto& out = sink.stream();
    out << std::setprecision(10);
    write_cms_csv(out, report);
    out << '\n';
    write_mprl_means_csv(out, mprl);
    out << '\n';
    write_mprl_pairs_csv(out, mprl);
    sink.finish(cmd.report);
    return 0;
}

int run_ablate(const AblateCommand& cmd)
{
    require_file(cmd.manifest, "--manifest");
    const std::string eval_manifest = cmd.eval_manifest.empty() ? cmd.manifest : cmd.eval_manifest;
    require_file(eval_manifest, "--eval-manifest");
    const auto sizes = parse_size_list(cmd.subset_sizes, "--subset-sizes");
    const bool both = !cmd.with_alpha && !cmd.without_alpha;
    std::vector<double> alphas;
    if (cmd.with_alpha || both) alphas.push_back(cmd.train.alpha);
    if (cmd.without_alpha || both) alphas.push_back(0.0);

    const NetworkSpec spec = resolve_spec(cmd.train);
    const auto window = checked_crop(cmd.train.crop, &spec);
    const std::size_t available = manifest_size(cmd.manifest);
    manifest_size(eval_manifest);

    // Validate every run's configuration before any training starts.
    std::vector<TrainConfig> configs;
    for (std::size_t size : sizes) {
        if (size > available) {
            throw UsageFailure("--subset-sizes: " + std::to_string(size) + " exceeds the " +
                               std::to_string(available) + " pairs in the manifest");
        }
        for (double alpha : alphas) {
            TrainOptions opts = cmd.train;
            opts.alpha = alpha;
            opts.batch = std::min<long long>(opts.batch, static_cast<long long>(size));
            configs.push_back(make_config(opts, size));
        }
    }

    const Dataset train_set = load_pairs(cmd.manifest, cmd.train.no_align, window, spec.total_shrink(), Split::train);
    const Dataset test_set = load_pairs(eval_manifest, cmd.train.no_align, window, spec.total_shrink(), Split::test);

    ReportSink sink(cmd.report);
    auto& out = sink.stream();
    out << "subset_size,alpha,rank1\n";
    std::size_t run = 0;
    for (std::size_t size : sizes) {
        const Dataset subset = take_subset(train_set, size);
        for (double alpha : alphas) {
            const auto result = train(subset, spec, configs[run++]);
            const auto report = evaluate_verification(result.net, test_set, {1}, std::max(1u, cmd.train.threads));
            out << size << ',' << brief(alpha) << ',' << report.scores.front() << '\n';
        }
    }
    sink.finish(cmd.report);
    return 0;
}

}  // namespace sketchnet::cli
