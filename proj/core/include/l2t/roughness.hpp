#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "l2t/warp.hpp"

namespace l2t {

// Hessian of x -> psi(|x - c|) written as a(r) I + b(r) (x - c)(x - c)^T.
struct RadialHessian {
    double a = 0.0;
    double b = 0.0;
};
RadialHessian radial_hessian(const RadialBasis& rbf, double r);

/// Integral of the squared Frobenius norm of D^2 phi over the grid box,
/// approximated by an N^3 midpoint rule on exact second derivatives.
///
/// The affine part has no curvature, so the penalty is the quadratic form
/// trace(W Q W^T) with Q = vol/N^3 * sum_x <H_a(x), H_b(x)>_F; Q is built once.
class RoughnessPenalty {
public:
    RoughnessPenalty(const ControlGrid& grid, const RadialBasis& rbf, std::size_t resolution = 16);

    double value(const Eigen::Matrix3Xd& W) const;
    // d value / dW, same shape as W.
    Eigen::Matrix3Xd gradient(const Eigen::Matrix3Xd& W) const;

    const Eigen::MatrixXd& gram() const { return gram_; }
    std::size_t resolution() const { return resolution_; }

private:
    std::size_t resolution_;
    Eigen::MatrixXd gram_;
};

struct RoughnessResult {
    double value = 0.0;
    Eigen::VectorXd gradient;  // w.r.t. packed theta; zero on A and o
};

RoughnessResult roughness(const WarpParameters& w, std::size_t resolution = 16);

}  // namespace l2t
