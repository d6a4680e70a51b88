#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "l2t/color.hpp"

namespace l2t {

enum class RbfKind { ThinPlate, Gaussian, InverseMultiquadric, InverseQuadric };

std::string_view to_string(RbfKind kind);
RbfKind rbf_kind_from_string(std::string_view name);  // "tps", "gaussian", "imq", "iq"

// Radial basis function psi(r). `epsilon` is ignored for the thin-plate kernel.
struct RadialBasis {
    RbfKind kind = RbfKind::ThinPlate;
    double epsilon = 1.0;

    double operator()(double r) const;
    bool operator==(const RadialBasis&) const = default;
};

double rbf_eval(const RadialBasis& rbf, double r);

/// Regular g x g x g lattice over an axis-aligned box, endpoints included.
/// Points are ordered lexicographically with the first channel slowest.
class ControlGrid {
public:
    ControlGrid();  // 5 per axis over the unit cube
    ControlGrid(std::size_t per_axis, const Color3& lower, const Color3& upper);

    // Default grid for a working space: unit cube for RGB, [0,1]x[-1,1]x[-1,1] for scaled Lab.
    static ControlGrid for_space(ColorSpace space, std::size_t per_axis = 5);

    std::size_t per_axis() const { return per_axis_; }
    std::size_t size() const { return per_axis_ * per_axis_ * per_axis_; }
    const Color3& lower() const { return lower_; }
    const Color3& upper() const { return upper_; }
    double volume() const { return (upper_ - lower_).prod(); }
    const Eigen::Matrix3Xd& points() const { return points_; }
    Color3 point(std::size_t j) const { return points_.col(static_cast<Eigen::Index>(j)); }

    bool operator==(const ControlGrid& other) const {
        return per_axis_ == other.per_axis_ && lower_ == other.lower_ && upper_ == other.upper_;
    }

private:
    std::size_t per_axis_;
    Color3 lower_;
    Color3 upper_;
    Eigen::Matrix3Xd points_;
};

/// phi(x) = A x + o + W Psi(x), with Psi_j(x) = psi(|x - c_j|).
///
/// Packed parameter order: A row-major (9), o (3), W column-major (3m);
/// 387 values for the default 125-point grid.
struct WarpParameters {
    Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    Eigen::Vector3d o = Eigen::Vector3d::Zero();
    Eigen::Matrix3Xd W;
    ControlGrid grid;
    RadialBasis rbf;
    ColorSpace space = ColorSpace::RGB;

    std::size_t parameter_count() const { return 12 + 3 * grid.size(); }
    Eigen::VectorXd pack() const;
    void unpack(std::span<const double> theta);

    bool same_family(const WarpParameters& other) const {
        return grid == other.grid && rbf == other.rbf && space == other.space;
    }
};

// Evaluates phi for many points with one warp. Holds the control points in
// structure-of-arrays form; `scratch` must have room for grid.size() values.
// eval_warp goes through this class, so both give identical bits.
class WarpKernel {
public:
    explicit WarpKernel(const WarpParameters& w);

    std::size_t scratch_size() const { return cx_.size(); }
    Color3 operator()(const Color3& x, double* scratch) const;

private:
    Eigen::Matrix3d A_;
    Eigen::Vector3d o_;
    Eigen::Matrix3Xd W_;
    RadialBasis rbf_;
    std::vector<double> cx_, cy_, cz_;
};

Eigen::VectorXd basis_vector(const ControlGrid& grid, const RadialBasis& rbf, const Color3& x);

Color3 eval_warp(const WarpParameters& w, const Color3& x);

WarpParameters identity_warp(const ControlGrid& grid, const RadialBasis& rbf, ColorSpace space = ColorSpace::RGB);

// Convex combination of packed parameters. All warps must share grid, basis
// and colour space; gammas must be non-negative and sum to 1.
WarpParameters interpolate(std::span<const WarpParameters> warps, std::span<const double> gammas);

// Text format: a versioned header followed by one parameter per line,
// printed with 17 significant digits.
void save_warp(const WarpParameters& w, const std::filesystem::path& path);
WarpParameters load_warp(const std::filesystem::path& path);

std::string serialise_warp(const WarpParameters& w);
WarpParameters parse_warp(std::string_view text);

}  // namespace l2t
