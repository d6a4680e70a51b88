#include "l2t/gmm.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "l2t/error.hpp"

namespace l2t {

namespace {

// Neumaier compensated summation; order of additions is the caller's.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void check_bandwidth(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("bandwidth h must be positive, got " + std::to_string(h));
}

double normaliser(double h) { return std::pow(4.0 * std::numbers::pi * h * h, -1.5); }

std::vector<Color3> warp_means(const std::vector<Color3>& means, const WarpParameters& warp) {
    const WarpKernel kernel(warp);
    std::vector<double> scratch(kernel.scratch_size());
    std::vector<Color3> out(means.size());
    for (std::size_t k = 0; k < means.size(); ++k) out[k] = kernel(means[k], scratch.data());
    return out;
}

}  // namespace

PairedGmms make_unpaired(std::vector<Color3> target_means, std::vector<Color3> palette_means, double h) {
    check_bandwidth(h);
    if (target_means.empty() || palette_means.empty()) throw InvalidArgument("mixtures need at least one mean");
    return PairedGmms{IsotropicGmm{std::move(target_means), h}, IsotropicGmm{std::move(palette_means), h}, false};
}

PairedGmms make_paired(const CorrespondenceSet& pairs, double h) {
    check_bandwidth(h);
    if (pairs.size() == 0 || pairs.target.size() != pairs.palette.size()) {
        throw InvalidArgument("correspondence set must hold at least one complete pair");
    }
    return PairedGmms{IsotropicGmm{pairs.target, h}, IsotropicGmm{pairs.palette, h}, true};
}

double gaussian_scalar_product(const Color3& mu1, const Color3& mu2, double h) {
    check_bandwidth(h);
    return normaliser(h) * std::exp(-(mu1 - mu2).squaredNorm() / (4.0 * h * h));
}

double residual_entropy(double h) {
    check_bandwidth(h);
    return normaliser(h);
}

double entropy_sum(std::span<const Color3> warped, double h, std::span<Color3> grad) {
    check_bandwidth(h);
    const std::size_t K = warped.size();
    if (K == 0) throw InvalidArgument("entropy term of an empty mixture");
    const bool want_grad = !grad.empty();
    if (want_grad && grad.size() != K) throw InvalidArgument("gradient buffer has the wrong size");
    const double c = normaliser(h);
    const double inv4h2 = 1.0 / (4.0 * h * h);
    const double inv2h2 = 1.0 / (2.0 * h * h);
    const double w = 1.0 / (static_cast<double>(K) * static_cast<double>(K));
    if (want_grad) std::fill(grad.begin(), grad.end(), Color3::Zero());

    // Diagonal terms contribute c each; off-diagonal pairs appear twice.
    CompensatedSum off;
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t l = k + 1; l < K; ++l) {
            const Color3 d = warped[k] - warped[l];
            const double g = c * std::exp(-d.squaredNorm() * inv4h2);
            off.add(g);
            if (want_grad) {
                // d/dy_k of 2 w g = 2 w g (-(y_k - y_l) / (2 h^2)); opposite sign for y_l.
                const Color3 f = (-2.0 * w * g * inv2h2) * d;
                grad[k] += f;
                grad[l] -= f;
            }
        }
    }
    return w * (static_cast<double>(K) * c + 2.0 * off.value());
}

double cross_sum(std::span<const Color3> warped, std::span<const Color3> palette, double h, bool paired,
                 std::span<Color3> grad) {
    check_bandwidth(h);
    const std::size_t Kt = warped.size();
    const std::size_t Kp = palette.size();
    if (Kt == 0 || Kp == 0) throw InvalidArgument("cross term of an empty mixture");
    if (paired && Kt != Kp) throw InvalidArgument("paired cross term needs equally sized mixtures");
    const bool want_grad = !grad.empty();
    if (want_grad && grad.size() != Kt) throw InvalidArgument("gradient buffer has the wrong size");
    const double c = normaliser(h);
    const double inv4h2 = 1.0 / (4.0 * h * h);
    const double inv2h2 = 1.0 / (2.0 * h * h);

    CompensatedSum total;
    if (paired) {
        const double w = 1.0 / static_cast<double>(Kt);
        for (std::size_t k = 0; k < Kt; ++k) {
            const Color3 d = warped[k] - palette[k];
            const double g = c * std::exp(-d.squaredNorm() * inv4h2);
            total.add(g);
            if (want_grad) grad[k] = (-w * g * inv2h2) * d;
        }
        return w * total.value();
    }

    const double w = 1.0 / (static_cast<double>(Kt) * static_cast<double>(Kp));
    for (std::size_t k = 0; k < Kt; ++k) {
        Color3 gk = Color3::Zero();
        for (std::size_t l = 0; l < Kp; ++l) {
            const Color3 d = warped[k] - palette[l];
            const double g = c * std::exp(-d.squaredNorm() * inv4h2);
            total.add(g);
            if (want_grad) gk += (-w * g * inv2h2) * d;
        }
        if (want_grad) grad[k] = gk;
    }
    return w * total.value();
}

double cross_term(const PairedGmms& gmms, const WarpParameters& warp) {
    const auto warped = warp_means(gmms.target.means, warp);
    return cross_sum(warped, gmms.palette.means, gmms.target.bandwidth, gmms.paired);
}

double entropy_term(const IsotropicGmm& target, const WarpParameters& warp) {
    const auto warped = warp_means(target.means, warp);
    return entropy_sum(warped, target.bandwidth);
}

}  // namespace l2t
