// l2transfer: colour transfer by robust registration of colour GMMs.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "l2t/error.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kNumericError = 3;

void add_estimation_flags(CLI::App* cmd, l2t::cli::PipelineConfig& cfg, std::optional<double>& lambda,
                          std::optional<double>& epsilon) {
    cmd->add_option("--space", cfg.space, "Working colour space")->check(CLI::IsMember({"rgb", "lab"}));
    cmd->add_option("--rbf", cfg.rbf, "Radial basis function")->check(CLI::IsMember({"tps", "gaussian", "imq", "iq"}));
    cmd->add_option("--mode", cfg.mode, "kmeans (no correspondences) or corr (aligned pair)")
        ->check(CLI::IsMember({"kmeans", "corr"}));
    cmd->add_option("--k", cfg.k, "Clusters per image in kmeans mode");
    cmd->add_option("--n", cfg.n, "Correspondences sampled in corr mode");
    cmd->add_option("--seed", cfg.seed, "Seed for clustering and sampling");
    cmd->add_option("--shift", cfg.shift_px, "Horizontal target shift in pixels (corr mode)");
    cmd->add_option("--lambda", lambda, "Roughness weight (default: tuned per rbf/space/mode)");
    cmd->add_option("--epsilon", epsilon, "Kernel scale for gaussian/imq/iq");
    cmd->add_option("--hmax", cfg.hmax, "Initial bandwidth");
    cmd->add_option("--hmin", cfg.hmin, "Smallest bandwidth visited");
    cmd->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    cmd->add_option("--log", cfg.log_path, "Write per-iteration diagnostics here");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Colour transfer by L2 registration of Gaussian mixtures"};
    app.require_subcommand(1);

    l2t::cli::PipelineConfig cfg;
    std::optional<double> lambda;
    std::optional<double> epsilon;
    std::string target, palette, output, warp_path, warp2_path, input, reference, csv, warp_out;
    std::optional<std::string> space;
    unsigned threads = 0;
    l2t::cli::MixOptions mix;

    auto* estimate = app.add_subcommand("estimate", "Estimate a warp from a target and a palette image");
    estimate->add_option("target", target)->required();
    estimate->add_option("palette", palette)->required();
    estimate->add_option("-o,--output", output, "Warp file to write")->required();
    add_estimation_flags(estimate, cfg, lambda, epsilon);

    auto* apply = app.add_subcommand("apply", "Recolour an image or a directory of frames with a warp");
    apply->add_option("warp", warp_path)->required();
    apply->add_option("input", input, "Image file or directory")->required();
    apply->add_option("-o,--output", output, "Output file or directory")->required();
    apply->add_option("--space", space, "Expected working space of the warp")->check(CLI::IsMember({"rgb", "lab"}));
    apply->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* mixcmd = app.add_subcommand("mix", "Recolour with a blend of two warps");
    mixcmd->add_option("warp1", warp_path)->required();
    mixcmd->add_option("warp2", warp2_path)->required();
    mixcmd->add_option("input", input, "Image file or directory")->required();
    mixcmd->add_option("-o,--output", output, "Output file or directory")->required();
    mixcmd->add_option("--gamma", mix.gamma, "Constant weight of warp1");
    mixcmd->add_option("--mask", mix.mask, "Greyscale mask (white = warp1), or a directory of per-frame masks");
    mixcmd->add_option("--schedule", mix.schedule, "Text file with one gamma per frame");
    mixcmd->add_option("--threads", mix.threads, "Worker threads (0 = all cores)");

    auto* metrics = app.add_subcommand("metrics", "PSNR and SSIM of a result against a reference");
    metrics->add_option("result", input)->required();
    metrics->add_option("reference", reference)->required();
    metrics->add_option("--csv", csv, "Append a CSV row to this file");

    auto* pipeline = app.add_subcommand("pipeline", "Estimate a warp and recolour the target in one go");
    pipeline->add_option("target", target)->required();
    pipeline->add_option("palette", palette)->required();
    pipeline->add_option("-o,--output", output, "Recoloured image to write")->required();
    pipeline->add_option("--warp-out", warp_out, "Also save the estimated warp");
    add_estimation_flags(pipeline, cfg, lambda, epsilon);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }
    cfg.lambda = lambda;
    cfg.epsilon = epsilon;

    try {
        if (*estimate) return l2t::cli::cmd_estimate(target, palette, output, cfg);
        if (*apply) return l2t::cli::cmd_apply(warp_path, input, output, space, threads);
        if (*mixcmd) return l2t::cli::cmd_mix(warp_path, warp2_path, input, output, mix);
        if (*metrics) return l2t::cli::cmd_metrics(input, reference, csv);
        if (*pipeline) return l2t::cli::cmd_pipeline(target, palette, output, warp_out, cfg);
    } catch (const l2t::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const l2t::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumericError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kUsageError;
}
