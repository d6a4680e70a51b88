#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "l2t/gmm.hpp"
#include "l2t/roughness.hpp"
#include "l2t/warp.hpp"

namespace l2t {

enum class EstimationMode { NoCorrespondence, Correspondence };

std::string_view to_string(EstimationMode mode);

struct ParameterDefaults {
    double lambda;
    double epsilon;  // unused by the thin-plate kernel
};

// Tuned roughness weight and kernel scale per basis, colour space and mode.
ParameterDefaults default_parameters(RbfKind kind, ColorSpace space, EstimationMode mode);

struct EstimationConfig {
    EstimationMode mode = EstimationMode::NoCorrespondence;
    double lambda = 3e-6;
    double epsilon = 1.0;
    double hmax = 0.5;
    double hmin = 0.05;
    double anneal_factor = 0.5;
    std::size_t inner_max_iters = 200;
    double inner_tol = 1e-8;
    std::size_t lbfgs_memory = 10;
    std::size_t roughness_resolution = 16;

    // Defaults for (kind, space, mode), including the tabulated lambda/epsilon.
    static EstimationConfig defaults_for(RbfKind kind, ColorSpace space, EstimationMode mode);
    void validate() const;
};

// Bandwidths visited by the annealing loop: hmax, hmax*f, ... while h >= hmin.
std::vector<double> annealing_schedule(const EstimationConfig& cfg);

struct CostBreakdown {
    double entropy = 0.0;
    double cross = 0.0;
    double roughness = 0.0;
    double total = 0.0;  // entropy - 2 cross + lambda roughness
};

/// Cost of a warp for one mixture pair, with its gradient in packed theta.
///
/// No-correspondence mode uses the full quadratic entropy of the warped
/// target mixture and the K_t x K_p cross term. Correspondence mode uses the
/// per-pair cross term (weights 1/n) and the constant residual-kernel
/// entropy, so one evaluation is O(n).
///
/// Basis values of the target means do not depend on theta and are cached,
/// as is the roughness Gram matrix.
class CostModel {
public:
    CostModel(const PairedGmms& gmms, const ControlGrid& grid, const RadialBasis& rbf, EstimationMode mode,
              double lambda, std::size_t roughness_resolution = 16);

    CostBreakdown evaluate(const WarpParameters& w, double h, Eigen::VectorXd* gradient = nullptr) const;
    CostBreakdown evaluate(const Eigen::VectorXd& theta, double h, Eigen::VectorXd* gradient = nullptr) const;

    std::size_t parameter_count() const { return 12 + 3 * static_cast<std::size_t>(basis_.rows()); }

private:
    EstimationMode mode_;
    double lambda_;
    Eigen::Matrix3Xd target_;
    std::vector<Color3> palette_;
    Eigen::MatrixXd basis_;  // m x K_t
    RoughnessPenalty penalty_;
};

CostBreakdown cost(const PairedGmms& gmms, const WarpParameters& w, double h, const EstimationConfig& cfg);
Eigen::VectorXd cost_gradient(const PairedGmms& gmms, const WarpParameters& w, double h, const EstimationConfig& cfg);

struct IterationRecord {
    std::size_t iteration = 0;
    CostBreakdown cost;
};

struct StageDiagnostics {
    double h = 0.0;
    std::vector<IterationRecord> trajectory;  // entry 0 is the stage's starting point
    std::string stop_reason;
};

struct EstimationResult {
    WarpParameters warp;
    std::vector<StageDiagnostics> stages;
};

// Annealed estimation starting from the identity warp. Each stage minimises
// the cost at a fixed bandwidth with L-BFGS and warm-starts the next one.
EstimationResult estimate_theta(const PairedGmms& gmms, const EstimationConfig& cfg, const ControlGrid& grid,
                                const RadialBasis& rbf, ColorSpace space = ColorSpace::RGB);

// Plain-text log, one line per recorded iterate:
// stage h iteration total entropy cross roughness
std::string format_diagnostics(const std::vector<StageDiagnostics>& stages);

}  // namespace l2t
