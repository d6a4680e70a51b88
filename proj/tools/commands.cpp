#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "l2t/clustering.hpp"
#include "l2t/error.hpp"
#include "l2t/gmm.hpp"
#include "l2t/image_io.hpp"
#include "l2t/metrics.hpp"
#include "l2t/recolor.hpp"

namespace l2t::cli {

namespace fs = std::filesystem;

namespace {

EstimationMode parse_mode(const std::string& mode) {
    if (mode == "kmeans") return EstimationMode::NoCorrespondence;
    if (mode == "corr") return EstimationMode::Correspondence;
    throw InvalidArgument("unknown mode '" + mode + "' (expected kmeans or corr)");
}

std::vector<Color3> cluster_means(const ImageBuffer& img, const PipelineConfig& cfg) {
    const ImageBuffer small = downsample_for_clustering(img, cfg.cluster_max_w, cfg.cluster_max_h);
    KMeansOptions opts;
    opts.threads = cfg.threads;
    return kmeans(small.pixels(), cfg.k, cfg.seed, opts).centers;
}

EstimationResult run_estimation(const fs::path& target_path, const fs::path& palette_path, const PipelineConfig& cfg,
                                const ResolvedConfig& rc) {
    const ImageBuffer target = to_space(load_image(target_path), rc.space);
    const ImageBuffer palette = to_space(load_image(palette_path), rc.space);
    PairedGmms gmms;
    if (rc.estimation.mode == EstimationMode::Correspondence) {
        gmms = make_paired(sample_correspondences(target, palette, cfg.n, cfg.seed, cfg.shift_px), rc.estimation.hmax);
    } else {
        gmms = make_unpaired(cluster_means(target, cfg), cluster_means(palette, cfg), rc.estimation.hmax);
    }
    EstimationResult result = estimate_theta(gmms, rc.estimation, ControlGrid::for_space(rc.space), rc.rbf, rc.space);
    if (!cfg.log_path.empty()) {
        std::ofstream log(cfg.log_path);
        if (!log) throw DataError("cannot write diagnostics log '" + cfg.log_path.string() + "'");
        log << format_diagnostics(result.stages);
    }
    return result;
}

void print_summary(const EstimationResult& result, const ResolvedConfig& rc) {
    std::cout << "mode=" << to_string(rc.estimation.mode) << " space=" << to_string(rc.space)
              << " rbf=" << to_string(rc.rbf.kind) << " lambda=" << rc.estimation.lambda
              << " epsilon=" << rc.estimation.epsilon << "\n";
    for (const auto& stage : result.stages) {
        const auto& last = stage.trajectory.back();
        std::cout << "  h=" << stage.h << " iterations=" << last.iteration << " cost=" << last.cost.total << " ("
                  << stage.stop_reason << ")\n";
    }
}

// Input file -> output file, or input directory -> output directory with the same names.
std::vector<std::pair<fs::path, fs::path>> io_pairs(const fs::path& input, const fs::path& output) {
    std::vector<std::pair<fs::path, fs::path>> pairs;
    std::error_code ec;
    if (fs::is_directory(input, ec)) {
        fs::create_directories(output, ec);
        if (ec) throw DataError("cannot create output directory '" + output.string() + "'");
        for (const auto& file : list_image_files(input)) pairs.emplace_back(file, output / file.filename());
        if (pairs.empty()) throw DataError("no png/jpeg images in '" + input.string() + "'");
    } else {
        if (output.has_parent_path()) fs::create_directories(output.parent_path(), ec);
        pairs.emplace_back(input, output);
    }
    return pairs;
}

}  // namespace

ResolvedConfig resolve(const PipelineConfig& cfg) {
    ResolvedConfig rc{color_space_from_string(cfg.space), RadialBasis{rbf_kind_from_string(cfg.rbf), 1.0},
                      EstimationConfig{}};
    const EstimationMode mode = parse_mode(cfg.mode);
    rc.estimation = EstimationConfig::defaults_for(rc.rbf.kind, rc.space, mode);
    if (cfg.lambda) rc.estimation.lambda = *cfg.lambda;
    if (cfg.epsilon) rc.estimation.epsilon = *cfg.epsilon;
    rc.estimation.hmax = cfg.hmax;
    rc.estimation.hmin = cfg.hmin;
    rc.estimation.validate();
    rc.rbf.epsilon = rc.estimation.epsilon;
    if (cfg.k == 0) throw InvalidArgument("--k must be at least 1");
    if (cfg.n == 0) throw InvalidArgument("--n must be at least 1");
    return rc;
}

int cmd_estimate(const fs::path& target, const fs::path& palette, const fs::path& warp_out, const PipelineConfig& cfg) {
    const ResolvedConfig rc = resolve(cfg);
    const EstimationResult result = run_estimation(target, palette, cfg, rc);
    save_warp(result.warp, warp_out);
    print_summary(result, rc);
    std::cout << "wrote " << warp_out.string() << "\n";
    return 0;
}

int cmd_apply(const fs::path& warp_path, const fs::path& input, const fs::path& output,
              const std::optional<std::string>& space, unsigned threads) {
    const WarpParameters warp = load_warp(warp_path);
    if (space && color_space_from_string(*space) != warp.space) {
        throw DataError("warp '" + warp_path.string() + "' works in " + std::string(to_string(warp.space)) +
                        ", not " + *space);
    }
    for (const auto& [in, out] : io_pairs(input, output)) {
        save_image(recolor_rgb(warp, load_image(in), threads), out);
        std::cout << in.string() << " -> " << out.string() << "\n";
    }
    return 0;
}

std::vector<double> read_schedule(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read gamma schedule '" + path.string() + "'");
    std::vector<double> gammas;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string token;
        while (fields >> token) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size() || v < 0.0 || v > 1.0) {
                throw DataError("gamma schedule '" + path.string() + "': bad value '" + token + "'");
            }
            gammas.push_back(v);
        }
    }
    return gammas;
}

int cmd_mix(const fs::path& warp1_path, const fs::path& warp2_path, const fs::path& input, const fs::path& output,
            const MixOptions& opts) {
    const int sources = (opts.gamma ? 1 : 0) + (opts.mask.empty() ? 0 : 1) + (opts.schedule.empty() ? 0 : 1);
    if (sources != 1) throw InvalidArgument("mix needs exactly one of --gamma, --mask or --schedule");
    const WarpParameters w1 = load_warp(warp1_path);
    const WarpParameters w2 = load_warp(warp2_path);
    if (!w1.same_family(w2)) throw DataError("warps differ in control grid, basis function or colour space");
    const auto pairs = io_pairs(input, output);

    std::vector<double> schedule;
    if (!opts.schedule.empty()) {
        schedule = read_schedule(opts.schedule);
        if (schedule.size() != pairs.size()) {
            throw DataError("schedule has " + std::to_string(schedule.size()) + " values for " +
                            std::to_string(pairs.size()) + " frames");
        }
    }
    if (opts.gamma && (*opts.gamma < 0.0 || *opts.gamma > 1.0)) throw InvalidArgument("--gamma must lie in [0,1]");

    std::vector<fs::path> masks;
    if (!opts.mask.empty()) {
        std::error_code ec;
        if (fs::is_directory(opts.mask, ec)) {
            masks = list_image_files(opts.mask);
            if (masks.size() != pairs.size()) {
                throw DataError("mask directory holds " + std::to_string(masks.size()) + " masks for " +
                                std::to_string(pairs.size()) + " frames");
            }
        } else {
            masks.assign(pairs.size(), opts.mask);
        }
    }

    for (std::size_t t = 0; t < pairs.size(); ++t) {
        const auto& [in, out] = pairs[t];
        const ImageBuffer rgb = load_image(in);
        const ImageBuffer work = to_space(rgb, w1.space);
        ImageBuffer result;
        if (!masks.empty()) {
            result = apply_mixed(w1, w2, MixMask::from_field(load_scalar_field(masks[t])), work, opts.threads);
        } else {
            const double g = opts.gamma ? *opts.gamma : schedule[t];
            const std::array<WarpParameters, 2> warps{w1, w2};
            const std::array<double, 2> gammas{g, 1.0 - g};
            result = apply(interpolate(warps, gammas), work, opts.threads);
        }
        save_image(to_space(result, ColorSpace::RGB), out);
        std::cout << in.string() << " -> " << out.string() << "\n";
    }
    return 0;
}

int cmd_metrics(const fs::path& result_path, const fs::path& reference_path, const fs::path& csv) {
    const MetricReport report = evaluate_metrics(load_image(result_path), load_image(reference_path));
    std::cout << format_report(report) << "\n";
    if (!csv.empty()) {
        std::ofstream out(csv, std::ios::app);
        if (!out) throw DataError("cannot append to '" + csv.string() + "'");
        char buf[64];
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", report.psnr, report.ssim);
        out << result_path.string() << "," << reference_path.string() << buf;
    }
    return 0;
}

int cmd_pipeline(const fs::path& target, const fs::path& palette, const fs::path& output, const fs::path& warp_out,
                 const PipelineConfig& cfg) {
    const ResolvedConfig rc = resolve(cfg);
    const EstimationResult result = run_estimation(target, palette, cfg, rc);
    if (!warp_out.empty()) save_warp(result.warp, warp_out);
    print_summary(result, rc);
    save_image(recolor_rgb(result.warp, load_image(target), cfg.threads), output);
    std::cout << "wrote " << output.string() << "\n";
    return 0;
}

}  // namespace l2t::cli
