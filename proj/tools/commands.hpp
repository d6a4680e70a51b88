#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "l2t/color.hpp"
#include "l2t/estimator.hpp"
#include "l2t/warp.hpp"

namespace l2t::cli {

struct PipelineConfig {
    std::string space = "rgb";
    std::string rbf = "tps";
    std::string mode = "kmeans";
    std::size_t k = 50;
    std::size_t n = 50000;
    std::uint64_t seed = 0;
    std::size_t shift_px = 0;
    std::optional<double> lambda;
    std::optional<double> epsilon;
    double hmax = 0.5;
    double hmin = 0.05;
    unsigned threads = 0;
    std::size_t cluster_max_w = 300;
    std::size_t cluster_max_h = 350;
    std::filesystem::path log_path;
};

struct ResolvedConfig {
    ColorSpace space;
    RadialBasis rbf;
    EstimationConfig estimation;
};

// Fills lambda/epsilon from the tuned defaults when they were not given.
ResolvedConfig resolve(const PipelineConfig& cfg);

int cmd_estimate(const std::filesystem::path& target, const std::filesystem::path& palette,
                 const std::filesystem::path& warp_out, const PipelineConfig& cfg);

int cmd_apply(const std::filesystem::path& warp_path, const std::filesystem::path& input,
              const std::filesystem::path& output, const std::optional<std::string>& space, unsigned threads);

struct MixOptions {
    std::optional<double> gamma;
    std::filesystem::path mask;
    std::filesystem::path schedule;
    unsigned threads = 0;
};

int cmd_mix(const std::filesystem::path& warp1, const std::filesystem::path& warp2,
            const std::filesystem::path& input, const std::filesystem::path& output, const MixOptions& opts);

int cmd_metrics(const std::filesystem::path& result, const std::filesystem::path& reference,
                const std::filesystem::path& csv);

int cmd_pipeline(const std::filesystem::path& target, const std::filesystem::path& palette,
                 const std::filesystem::path& output, const std::filesystem::path& warp_out,
                 const PipelineConfig& cfg);

std::vector<double> read_schedule(const std::filesystem::path& path);

}  // namespace l2t::cli
