#pragma once

#include <span>
#include <vector>

#include "l2t/clustering.hpp"
#include "l2t/color.hpp"
#include "l2t/warp.hpp"

namespace l2t {

// Equal-weight mixture of isotropic Gaussians N(mu_k, h^2 I).
struct IsotropicGmm {
    std::vector<Color3> means;
    double bandwidth = 1.0;

    std::size_t size() const { return means.size(); }
    double weight() const { return 1.0 / static_cast<double>(means.size()); }
};

// Target and palette mixtures. When `paired`, means are index-aligned
// correspondences and both mixtures have the same size.
struct PairedGmms {
    IsotropicGmm target;
    IsotropicGmm palette;
    bool paired = false;
};

PairedGmms make_unpaired(std::vector<Color3> target_means, std::vector<Color3> palette_means, double h);
PairedGmms make_paired(const CorrespondenceSet& pairs, double h);

// <N(mu1, h^2 I) | N(mu2, h^2 I)> = N(0; mu1 - mu2, 2 h^2 I)
//                                 = (4 pi h^2)^(-3/2) exp(-|mu1 - mu2|^2 / (4 h^2)).
double gaussian_scalar_product(const Color3& mu1, const Color3& mu2, double h);

// Cross term <p_t(phi) | p_p>. Unpaired: (1/(Kt Kp)) sum_k sum_l.
// Paired: (1/n) sum_k over index-aligned pairs only.
double cross_term(const PairedGmms& gmms, const WarpParameters& warp);

// Quadratic entropy ||p_t(phi)||^2 = (1/Kt^2) sum_k sum_l.
double entropy_term(const IsotropicGmm& target, const WarpParameters& warp);

// Residual-kernel self product used as the entropy of the correspondence
// objective: <N(0, h^2 I) | N(0, h^2 I)>, independent of the warp.
double residual_entropy(double h);

// Kernel sums over already-warped target means. When `grad` is non-empty it
// receives d(sum)/d(warped_k) and must have warped.size() entries.
double entropy_sum(std::span<const Color3> warped, double h, std::span<Color3> grad = {});
double cross_sum(std::span<const Color3> warped, std::span<const Color3> palette, double h, bool paired,
                 std::span<Color3> grad = {});

}  // namespace l2t
