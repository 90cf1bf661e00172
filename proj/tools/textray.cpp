#include "textray/cli.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>

namespace {

using textray::cli::RunConfig;

void add_common(CLI::App& cmd, RunConfig& cfg, std::string& degrees, std::string& levels) {
    cmd.add_option("--corpus", cfg.corpus, "Corpus document (ground truth for eval)");
    cmd.add_option("--out", cfg.out, "Output document");
    cmd.add_option("--rays", cfg.n_rays, "Rays per instance")->capture_default_str();
    cmd.add_option("--degree", cfg.degree, "Chebyshev fitting degree")->capture_default_str();
    cmd.add_option("--degrees", degrees, "Comma-separated degree list for sweep");
    cmd.add_option("--levels", levels, "Level ranges as lo:hi pairs, e.g. 0:0.3,0.2:0.55,0.45:0.8,0.7:inf");
    cmd.add_option("--neg-thresh", cfg.neg_thresh, "Central weight below which points are negative")
        ->capture_default_str();
    cmd.add_option("--pos-thresh", cfg.pos_thresh, "Central weight above which points are positive")
        ->capture_default_str();
    cmd.add_option("--score-thresh", cfg.score_thresh, "Minimum detection score")->capture_default_str();
    cmd.add_option("--iou-thresh", cfg.iou_thresh, "IoU for a true positive")->capture_default_str();
    cmd.add_option("--sigma", cfg.sigma, "Soft-NMS Gaussian sigma")->capture_default_str();
    cmd.add_option("--seed", cfg.seed, "Seed for every random draw")->capture_default_str();
    cmd.add_option("--workers", cfg.workers, "Worker threads (0: available parallelism)");
    cmd.add_flag("--lenient", cfg.lenient, "Skip invalid instances instead of failing");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polar Chebyshev contour encoding toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string degrees;
    std::string levels;

    auto* encode = app.add_subcommand("encode", "Encode every corpus instance and report fidelity");
    auto* sweep = app.add_subcommand("sweep", "Reconstruction fidelity per fitting degree");
    auto* eval = app.add_subcommand("eval", "Precision/recall/F-measure of detections against a corpus");
    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the content-loss gradient");
    auto* synth = app.add_subcommand("synth", "Write a synthetic corpus");
    auto* post = app.add_subcommand("postprocess", "Decode scored encodings, threshold and Soft-NMS");
    auto* targets = app.add_subcommand("targets", "Central weights, point labels and level assignment");
    for (auto* cmd : {encode, sweep, eval, gradcheck, synth, post, targets}) add_common(*cmd, cfg, degrees, levels);

    eval->add_option("--detections", cfg.detections, "Detections document")->required();
    eval->add_flag("--per-image", cfg.per_image, "Average per-image P/R instead of pooling counts");
    gradcheck->add_option("--pairs", cfg.pairs, "Random (pred, target) pairs")->capture_default_str();
    gradcheck->add_flag("--inject-sign-error", cfg.inject_sign_error, "Negate the analytic gradient (negative control)");
    synth->add_option("--instances", cfg.instances, "Number of instances")->capture_default_str();
    synth->add_flag("--spiral", cfg.spiral, "Write the single-spiral corpus instead");
    post->add_option("--predictions", cfg.predictions, "Scored encodings document")->required();
    targets->add_option("--stride", cfg.stride, "Sampling stride in pixels")->capture_default_str();

    try {
        app.parse(argc, argv);
        if (!degrees.empty()) cfg.degrees = textray::cli::parse_degree_list(degrees);
        if (!levels.empty()) cfg.levels = textray::cli::parse_level_list(levels);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return textray::cli::kValidationFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return textray::cli::kValidationFailure;
    }

    if (encode->parsed()) return textray::cli::cmd_encode(cfg, std::cout);
    if (sweep->parsed()) return textray::cli::cmd_sweep(cfg, std::cout);
    if (eval->parsed()) return textray::cli::cmd_eval(cfg, std::cout);
    if (gradcheck->parsed()) return textray::cli::cmd_gradcheck(cfg, std::cout);
    if (synth->parsed()) return textray::cli::cmd_synth(cfg, std::cout);
    if (post->parsed()) return textray::cli::cmd_postprocess(cfg, std::cout);
    if (targets->parsed()) return textray::cli::cmd_targets(cfg, std::cout);
    return textray::cli::kValidationFailure;
}
