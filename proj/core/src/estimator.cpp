#include "l2t/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <string>

#include "l2t/error.hpp"

namespace l2t {

std::string_view to_string(EstimationMode mode) {
    return mode == EstimationMode::Correspondence ? "corr" : "kmeans";
}

ParameterDefaults default_parameters(RbfKind kind, ColorSpace space, EstimationMode mode) {
    const bool corr = mode == EstimationMode::Correspondence;
    const bool rgb = space == ColorSpace::RGB;
    switch (kind) {
        case RbfKind::ThinPlate:
            if (corr) return {3e-3, 1.0};
            return {rgb ? 3e-6 : 3e-4, 1.0};
        case RbfKind::Gaussian:
            if (rgb) return {corr ? 3e-5 : 3e-8, 6e-3};
            return {corr ? 6e-3 : 3e-4, 3.0};
        case RbfKind::InverseMultiquadric:
            if (rgb) return {corr ? 3e-5 : 3e-8, 6e-3};
            return corr ? ParameterDefaults{6e-3, 10.0} : ParameterDefaults{3e-4, 3.0};
        case RbfKind::InverseQuadric:
            if (rgb) return {corr ? 3e-6 : 3e-8, 6e-3};
            return corr ? ParameterDefaults{6e-3, 30.0} : ParameterDefaults{3e-4, 3.0};
    }
    return {3e-6, 1.0};
}

EstimationConfig EstimationConfig::defaults_for(RbfKind kind, ColorSpace space, EstimationMode mode) {
    EstimationConfig cfg;
    cfg.mode = mode;
    const ParameterDefaults d = default_parameters(kind, space, mode);
    cfg.lambda = d.lambda;
    cfg.epsilon = d.epsilon;
    return cfg;
}

void EstimationConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive");
    if (!(hmin > 0.0) || !(hmax > hmin) || !std::isfinite(hmax)) throw InvalidArgument("need 0 < hmin < hmax");
    if (!(anneal_factor > 0.0 && anneal_factor < 1.0)) throw InvalidArgument("anneal factor must lie in (0,1)");
    if (inner_max_iters == 0) throw InvalidArgument("inner_max_iters must be positive");
    if (!(inner_tol >= 0.0)) throw InvalidArgument("inner_tol must be >= 0");
    if (lbfgs_memory == 0) throw InvalidArgument("lbfgs_memory must be positive");
    if (roughness_resolution == 0) throw InvalidArgument("roughness resolution must be positive");
}

std::vector<double> annealing_schedule(const EstimationConfig& cfg) {
    cfg.validate();
    std::vector<double> hs;
    for (double h = cfg.hmax; h >= cfg.hmin; h *= cfg.anneal_factor) hs.push_back(h);
    return hs;
}

CostModel::CostModel(const PairedGmms& gmms, const ControlGrid& grid, const RadialBasis& rbf, EstimationMode mode,
                     double lambda, std::size_t roughness_resolution)
    : mode_(mode), lambda_(lambda), palette_(gmms.palette.means), penalty_(grid, rbf, roughness_resolution) {
    if ((mode == EstimationMode::Correspondence) != gmms.paired) {
        throw InvalidArgument(mode == EstimationMode::Correspondence
                                  ? "correspondence mode needs paired mixtures"
                                  : "no-correspondence mode needs unpaired mixtures");
    }
    if (gmms.target.means.empty() || gmms.palette.means.empty()) throw InvalidArgument("empty mixture");
    if (gmms.paired && gmms.target.size() != gmms.palette.size()) {
        throw InvalidArgument("paired mixtures must have equal sizes");
    }
    const auto K = static_cast<Eigen::Index>(gmms.target.size());
    target_.resize(3, K);
    basis_.resize(static_cast<Eigen::Index>(grid.size()), K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const Color3& mu = gmms.target.means[static_cast<std::size_t>(k)];
        target_.col(k) = mu;
        basis_.col(k) = basis_vector(grid, rbf, mu);
    }
}

CostBreakdown CostModel::evaluate(const WarpParameters& w, double h, Eigen::VectorXd* gradient) const {
    return evaluate(w.pack(), h, gradient);
}

CostBreakdown CostModel::evaluate(const Eigen::VectorXd& theta, double h, Eigen::VectorXd* gradient) const {
    const auto m = basis_.rows();
    if (static_cast<std::size_t>(theta.size()) != parameter_count()) {
        throw InvalidArgument("parameter vector has the wrong length");
    }
    Eigen::Matrix3d A;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) A(r, c) = theta[r * 3 + c];
    const Eigen::Vector3d o = theta.segment<3>(9);
    const Eigen::Map<const Eigen::Matrix3Xd> W(theta.data() + 12, 3, m);

    Eigen::Matrix3Xd warped = A * target_ + W * basis_;
    warped.colwise() += o;
    const auto K = static_cast<std::size_t>(warped.cols());
    std::vector<Color3> warped_span(K);
    for (std::size_t k = 0; k < K; ++k) warped_span[k] = warped.col(static_cast<Eigen::Index>(k));

    std::vector<Color3> d_entropy;
    std::vector<Color3> d_cross;
    if (gradient) {
        d_cross.resize(K);
        if (mode_ == EstimationMode::NoCorrespondence) d_entropy.resize(K);
    }

    CostBreakdown out;
    const bool paired = mode_ == EstimationMode::Correspondence;
    out.entropy = paired ? residual_entropy(h) : entropy_sum(warped_span, h, d_entropy);
    out.cross = cross_sum(warped_span, palette_, h, paired, d_cross);
    out.roughness = penalty_.value(W);
    out.total = out.entropy - 2.0 * out.cross + lambda_ * out.roughness;

    if (gradient) {
        Eigen::Matrix3Xd dY(3, static_cast<Eigen::Index>(K));
        for (std::size_t k = 0; k < K; ++k) {
            Color3 g = -2.0 * d_cross[k];
            if (!paired) g += d_entropy[k];
            dY.col(static_cast<Eigen::Index>(k)) = g;
        }
        gradient->resize(theta.size());
        const Eigen::Matrix3d dA = dY * target_.transpose();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) (*gradient)[r * 3 + c] = dA(r, c);
        gradient->segment<3>(9) = dY.rowwise().sum();
        Eigen::Matrix3Xd dW = dY * basis_.transpose();
        if (lambda_ != 0.0) dW += lambda_ * penalty_.gradient(W);
        gradient->tail(3 * m) = Eigen::Map<const Eigen::VectorXd>(dW.data(), 3 * m);
    }
    return out;
}

CostBreakdown cost(const PairedGmms& gmms, const WarpParameters& w, double h, const EstimationConfig& cfg) {
    const CostModel model(gmms, w.grid, w.rbf, cfg.mode, cfg.lambda, cfg.roughness_resolution);
    return model.evaluate(w, h);
}

Eigen::VectorXd cost_gradient(const PairedGmms& gmms, const WarpParameters& w, double h, const EstimationConfig& cfg) {
    const CostModel model(gmms, w.grid, w.rbf, cfg.mode, cfg.lambda, cfg.roughness_resolution);
    Eigen::VectorXd g;
    model.evaluate(w, h, &g);
    return g;
}

namespace {

bool finite(const CostBreakdown& c) { return std::isfinite(c.total); }

std::string numeric_failure(std::size_t stage, double h, std::size_t iteration) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "non-finite cost at annealing stage %zu (h=%.6g), iteration %zu", stage, h,
                  iteration);
    return buf;
}

// L-BFGS with Armijo backtracking. Every accepted step strictly lowers the
// cost, so the recorded trajectory is monotone.
void minimise_stage(const CostModel& model, Eigen::VectorXd& theta, double h, const EstimationConfig& cfg,
                    std::size_t stage_index, StageDiagnostics& diag) {
    constexpr double kArmijo = 1e-4;
    constexpr std::size_t kMaxBacktracks = 50;

    Eigen::VectorXd grad;
    CostBreakdown current = model.evaluate(theta, h, &grad);
    if (!finite(current) || !grad.allFinite()) throw NumericError(numeric_failure(stage_index, h, 0));
    diag.trajectory.push_back({0, current});

    std::deque<Eigen::VectorXd> s_hist;
    std::deque<Eigen::VectorXd> y_hist;
    std::deque<double> rho_hist;

    for (std::size_t iter = 1; iter <= cfg.inner_max_iters; ++iter) {
        if (grad.lpNorm<Eigen::Infinity>() <= 1e-14) {
            diag.stop_reason = "stationary";
            return;
        }

        // Two-loop recursion.
        Eigen::VectorXd q = grad;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        } else {
            q /= std::max(1.0, grad.norm());
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(q);
            q += (alpha[i] - beta) * s_hist[i];
        }
        Eigen::VectorXd direction = -q;
        double slope = grad.dot(direction);
        if (!(slope < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            direction = -grad / std::max(1.0, grad.norm());
            slope = grad.dot(direction);
        }

        double step = 1.0;
        Eigen::VectorXd candidate;
        Eigen::VectorXd candidate_grad;
        CostBreakdown trial;
        bool accepted = false;
        for (std::size_t bt = 0; bt < kMaxBacktracks; ++bt) {
            candidate = theta + step * direction;
            trial = model.evaluate(candidate, h, &candidate_grad);
            if (finite(trial) && candidate_grad.allFinite() && trial.total <= current.total + kArmijo * step * slope &&
                trial.total < current.total) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!finite(trial)) throw NumericError(numeric_failure(stage_index, h, iter));
            diag.stop_reason = "line search made no progress";
            return;
        }

        Eigen::VectorXd s = candidate - theta;
        Eigen::VectorXd y = candidate_grad - grad;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > cfg.lbfgs_memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        const double decrease = current.total - trial.total;
        theta = std::move(candidate);
        grad = std::move(candidate_grad);
        current = trial;
        diag.trajectory.push_back({iter, current});

        // The first step of a stage uses an unscaled direction; judge convergence from the second on.
        if (iter > 1 && decrease <= cfg.inner_tol * std::max(std::abs(current.total), 1e-300)) {
            diag.stop_reason = "relative decrease below tolerance";
            return;
        }
    }
    diag.stop_reason = "iteration limit";
}

}  // namespace

EstimationResult estimate_theta(const PairedGmms& gmms, const EstimationConfig& cfg, const ControlGrid& grid,
                                const RadialBasis& rbf, ColorSpace space) {
    cfg.validate();
    const CostModel model(gmms, grid, rbf, cfg.mode, cfg.lambda, cfg.roughness_resolution);

    EstimationResult result;
    result.warp = identity_warp(grid, rbf, space);
    Eigen::VectorXd theta = result.warp.pack();
    std::size_t stage = 0;
    for (double h : annealing_schedule(cfg)) {
        StageDiagnostics diag;
        diag.h = h;
        minimise_stage(model, theta, h, cfg, stage++, diag);
        result.stages.push_back(std::move(diag));
    }
    result.warp.unpack(std::span<const double>(theta.data(), static_cast<std::size_t>(theta.size())));
    return result;
}

std::string format_diagnostics(const std::vector<StageDiagnostics>& stages) {
    std::string out = "# stage h iteration total entropy cross roughness\n";
    char buf[256];
    for (std::size_t s = 0; s < stages.size(); ++s) {
        for (const auto& rec : stages[s].trajectory) {
            std::snprintf(buf, sizeof buf, "%zu %.6g %zu %.17g %.17g %.17g %.17g\n", s, stages[s].h, rec.iteration,
                          rec.cost.total, rec.cost.entropy, rec.cost.cross, rec.cost.roughness);
            out += buf;
        }
    }
    return out;
}

}  // namespace l2t
