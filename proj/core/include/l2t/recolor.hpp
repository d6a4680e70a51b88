#pragma once

#include <span>
#include <vector>

#include "l2t/color.hpp"
#include "l2t/image_io.hpp"
#include "l2t/warp.hpp"

namespace l2t {

// Per-pixel blend weight gamma(p) in [0,1] between two warps.
struct MixMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values;

    static MixMask constant(std::size_t width, std::size_t height, double gamma);
    static MixMask from_field(const ScalarField& field);  // clamps to [0,1]
};

// phi(x) per pixel, then per-channel clamp to the space's valid range.
// The image must already be in the warp's working space. Rows are split
// across `threads` workers (0 = all cores); output does not depend on it.
ImageBuffer apply(const WarpParameters& w, const ImageBuffer& img, unsigned threads = 0);

// Pixel p is recoloured with theta = gamma(p) theta1 + (1 - gamma(p)) theta2.
ImageBuffer apply_mixed(const WarpParameters& w1, const WarpParameters& w2, const MixMask& mask,
                        const ImageBuffer& img, unsigned threads = 0);

// Frame t is recoloured with theta(t) = gamma(t) theta_from + (1 - gamma(t)) theta_to.
std::vector<ImageBuffer> apply_dissolve(const WarpParameters& w_from, const WarpParameters& w_to,
                                        std::span<const double> gammas, std::span<const ImageBuffer> frames,
                                        unsigned threads = 0);

// Convenience for RGB inputs: converts into the warp's space, applies, and
// returns an RGB buffer clamped to [0,1].
ImageBuffer recolor_rgb(const WarpParameters& w, const ImageBuffer& rgb, unsigned threads = 0);

}  // namespace l2t
