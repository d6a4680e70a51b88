#pragma once

// Reference computations written independently of the library's code paths.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Core>

namespace l2t::testing {

// Triple-loop trapezoid quadrature of N(x; mu1, h^2 I) N(x; mu2, h^2 I)
// over a box reaching 9h beyond both means.
inline double gaussian_product_quadrature(const Eigen::Vector3d& mu1, const Eigen::Vector3d& mu2, double h,
                                          int nodes = 161) {
    const Eigen::Vector3d lo = mu1.cwiseMin(mu2).array() - 9.0 * h;
    const Eigen::Vector3d hi = mu1.cwiseMax(mu2).array() + 9.0 * h;
    const Eigen::Vector3d step = (hi - lo) / (nodes - 1);
    const double norm = std::pow(2.0 * std::numbers::pi * h * h, -1.5);
    double total = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double wi = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
        for (int j = 0; j < nodes; ++j) {
            const double wj = (j == 0 || j == nodes - 1) ? 0.5 : 1.0;
            for (int k = 0; k < nodes; ++k) {
                const double wk = (k == 0 || k == nodes - 1) ? 0.5 : 1.0;
                const Eigen::Vector3d x = lo + Eigen::Vector3d(i * step[0], j * step[1], k * step[2]);
                const double p1 = norm * std::exp(-(x - mu1).squaredNorm() / (2.0 * h * h));
                const double p2 = norm * std::exp(-(x - mu2).squaredNorm() / (2.0 * h * h));
                total += wi * wj * wk * p1 * p2;
            }
        }
    }
    return total * step.prod();
}

// Central finite differences of f at x with a fixed step.
inline Eigen::VectorXd central_differences(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        const double up = f(probe);
        probe[i] = x[i] - step;
        const double down = f(probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * step);
    }
    return g;
}

// |a - b| <= max(rel * max(|a|,|b|), abs_floor), per coordinate.
inline bool gradients_agree(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double rel, double abs_floor,
                            double* worst = nullptr) {
    bool ok = true;
    double worst_ratio = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double err = std::abs(a[i] - b[i]);
        const double tol = std::max(rel * std::max(std::abs(a[i]), std::abs(b[i])), abs_floor);
        worst_ratio = std::max(worst_ratio, err / tol);
        if (err > tol) ok = false;
    }
    if (worst) *worst = worst_ratio;
    return ok;
}

}  // namespace l2t::testing
