#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "sketchnet/errors.hpp"

namespace {

void add_train_options(CLI::App& cmd, sketchnet::cli::TrainOptions& opts)
{
    cmd.add_option("--arch", opts.arch, "sr, small, medium, large, or a layer-list file")->capture_default_str();
    cmd.add_option("--iters", opts.iterations, "SGD iterations")->capture_default_str();
    cmd.add_option("--lr", opts.learning_rate, "learning rate")->capture_default_str();
    cmd.add_option("--alpha", opts.alpha, "discriminative regularizer weight")->capture_default_str();
    cmd.add_option("--lambda", opts.lambda, "regularizer distance divisor")->capture_default_str();
    cmd.add_option("--batch", opts.batch, "pairs per iteration")->capture_default_str();
    cmd.add_option("--seed", opts.seed, "seed for initialisation and batch sampling")->capture_default_str();
    cmd.add_flag("--no-xy", opts.no_xy, "train on RGB only, without coordinate channels");
    cmd.add_flag("--no-align", opts.no_align, "ignore manifest eye coordinates");
    cmd.add_option("--crop", opts.crop, "train on centred HxW photo crops, e.g. 41x41");
    cmd.add_option("--threads", opts.threads, "worker threads inside convolutions")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace sketchnet::cli;

    CLI::App app{"Photo-to-sketch generation with a fully convolutional network"};
    app.require_subcommand(1);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic photo/sketch dataset");
    synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
    synth_cmd->add_option("--count", synth.count, "number of pairs")->required();
    synth_cmd->add_option("--out-dir", synth.out_dir)->required();

    TrainCommand train;
    auto* train_cmd = app.add_subcommand("train", "train a model");
    train_cmd->add_option("--manifest", train.manifest)->required();
    add_train_options(*train_cmd, train.train);
    train_cmd->add_option("--out-model", train.out_model)->required();
    train_cmd->add_option("--log", train.log, "per-iteration loss log (CSV)");
    train_cmd->add_option("--checkpoint-every", train.checkpoint_every, "save <out-model>.ckpt every N iterations");

    GenerateCommand generate;
    auto* generate_cmd = app.add_subcommand("generate", "turn one photo into a pseudo-sketch");
    generate_cmd->add_option("--model", generate.model)->required();
    generate_cmd->add_option("--photo", generate.photo)->required();
    generate_cmd->add_option("--out", generate.out)->required();
    generate_cmd->add_option("--eyes", generate.eyes, "lx,ly,rx,ry eye centres for alignment");
    generate_cmd->add_flag("--timing", generate.timing, "print forward-pass milliseconds");
    generate_cmd->add_option("--threads", generate.threads)->capture_default_str();

    EvaluateCommand evaluate;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "CMS verification and MPRL report");
    evaluate_cmd->add_option("--model", evaluate.model);
    evaluate_cmd->add_option("--manifest", evaluate.manifest)->required();
    evaluate_cmd->add_option("--ranks", evaluate.ranks)->capture_default_str();
    evaluate_cmd->add_option("--report", evaluate.report, "output path (default stdout)");
    evaluate_cmd->add_option("--crop", evaluate.crop, "evaluate on centred HxW photo crops");
    evaluate_cmd->add_flag("--baseline-grayscale", evaluate.baseline_grayscale,
                           "use grayscale photos as pseudo-sketches");
    evaluate_cmd->add_flag("--identity-gallery", evaluate.identity_gallery,
                           "sanity check: gallery is the query sketches themselves");
    evaluate_cmd->add_flag("--no-align", evaluate.no_align, "ignore manifest eye coordinates");
    evaluate_cmd->add_option("--threads", evaluate.threads)->capture_default_str();

    AblateCommand ablate;
    auto* ablate_cmd = app.add_subcommand("ablate", "training-set-size sweep with and without the regularizer");
    ablate_cmd->add_option("--manifest", ablate.manifest, "training pairs")->required();
    ablate_cmd->add_option("--eval-manifest", ablate.eval_manifest, "test pairs (default: --manifest)");
    ablate_cmd->add_option("--subset-sizes", ablate.subset_sizes)->capture_default_str();
    ablate_cmd->add_flag("--with-alpha", ablate.with_alpha, "include runs with the regularizer");
    ablate_cmd->add_flag("--without-alpha", ablate.without_alpha, "include runs without the regularizer");
    add_train_options(*ablate_cmd, ablate.train);
    ablate_cmd->add_option("--report", ablate.report, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*synth_cmd) return run_synth(synth);
        if (*train_cmd) return run_train(train);
        if (*generate_cmd) return run_generate(generate);
        if (*evaluate_cmd) return run_evaluate(evaluate);
        if (*ablate_cmd) return run_ablate(ablate);
    } catch (const UsageFailure& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
