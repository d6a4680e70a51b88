#include "l2t/roughness.hpp"

#include <cmath>
#include <numbers>

#include "l2t/error.hpp"

namespace l2t {

RadialHessian radial_hessian(const RadialBasis& rbf, double r) {
    const double e2 = rbf.epsilon * rbf.epsilon;
    switch (rbf.kind) {
        case RbfKind::ThinPlate:
            // Singular at the centre; quadrature nodes that land on a centre are dropped.
            if (r < 1e-12) return {};
            return {-1.0 / r, 1.0 / (r * r * r)};
        case RbfKind::Gaussian: {
            const double psi = std::exp(-e2 * r * r);
            return {-2.0 * e2 * psi, 4.0 * e2 * e2 * psi};
        }
        case RbfKind::InverseMultiquadric: {
            const double q = 1.0 / std::sqrt(1.0 + e2 * r * r);
            const double q3 = q * q * q;
            return {-e2 * q3, 3.0 * e2 * e2 * q3 * q * q};
        }
        case RbfKind::InverseQuadric: {
            const double p = 1.0 / (1.0 + e2 * r * r);
            return {-2.0 * e2 * p * p, 8.0 * e2 * e2 * p * p * p};
        }
    }
    return {};
}

RoughnessPenalty::RoughnessPenalty(const ControlGrid& grid, const RadialBasis& rbf, std::size_t resolution)
    : resolution_(resolution) {
    if (resolution == 0) throw InvalidArgument("roughness quadrature resolution must be positive");
    const std::size_t n = resolution;
    const std::size_t samples = n * n * n;
    const auto m = static_cast<Eigen::Index>(grid.size());
    const auto& centres = grid.points();
    const Color3 lo = grid.lower();
    const Color3 span = grid.upper() - grid.lower();

    // Each sample contributes six rows: the upper triangle of the symmetric
    // Hessian, off-diagonals scaled by sqrt(2) so that row dot products give
    // the full Frobenius inner product. Rows are accumulated one x-slab at a time.
    const double s2 = std::numbers::sqrt2;
    gram_ = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(6 * n * n), m);
    for (std::size_t i0 = 0; i0 < n; ++i0) {
        Eigen::Index row = 0;
        for (std::size_t i1 = 0; i1 < n; ++i1) {
            for (std::size_t i2 = 0; i2 < n; ++i2) {
                const Color3 t((static_cast<double>(i0) + 0.5) / static_cast<double>(n),
                               (static_cast<double>(i1) + 0.5) / static_cast<double>(n),
                               (static_cast<double>(i2) + 0.5) / static_cast<double>(n));
                const Color3 x = lo + t.cwiseProduct(span);
                for (Eigen::Index j = 0; j < m; ++j) {
                    const Color3 d = x - centres.col(j);
                    const RadialHessian h = radial_hessian(rbf, d.norm());
                    rows(row + 0, j) = h.a + h.b * d[0] * d[0];
                    rows(row + 1, j) = h.a + h.b * d[1] * d[1];
                    rows(row + 2, j) = h.a + h.b * d[2] * d[2];
                    rows(row + 3, j) = s2 * h.b * d[0] * d[1];
                    rows(row + 4, j) = s2 * h.b * d[0] * d[2];
                    rows(row + 5, j) = s2 * h.b * d[1] * d[2];
                }
                row += 6;
            }
        }
        gram_.noalias() += rows.transpose() * rows;
    }
    const double cell = grid.volume() / static_cast<double>(samples);
    gram_ *= cell;
    gram_ = 0.5 * (gram_ + gram_.transpose()).eval();
}

double RoughnessPenalty::value(const Eigen::Matrix3Xd& W) const {
    return (W * gram_).cwiseProduct(W).sum();
}

Eigen::Matrix3Xd RoughnessPenalty::gradient(const Eigen::Matrix3Xd& W) const { return 2.0 * W * gram_; }

RoughnessResult roughness(const WarpParameters& w, std::size_t resolution) {
    const RoughnessPenalty penalty(w.grid, w.rbf, resolution);
    RoughnessResult out;
    out.value = penalty.value(w.W);
    out.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w.parameter_count()));
    const Eigen::Matrix3Xd g = penalty.gradient(w.W);
    out.gradient.tail(g.size()) = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
    return out;
}

}  // namespace l2t
