#include "l2t/recolor.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <string>

#include "l2t/error.hpp"
#include "l2t/parallel.hpp"

namespace l2t {

namespace {

constexpr std::size_t kMaxCachedGammas = 4096;

void check_space(const WarpParameters& w, const ImageBuffer& img) {
    if (w.space != img.space()) {
        throw DataError("warp works in " + std::string(to_string(w.space)) + " but the image is " +
                        std::string(to_string(img.space())));
    }
}

WarpParameters mix_pair(const WarpParameters& w1, const WarpParameters& w2, double gamma) {
    const std::array<WarpParameters, 2> warps{w1, w2};
    const std::array<double, 2> gammas{gamma, 1.0 - gamma};
    return interpolate(warps, gammas);
}

}  // namespace

MixMask MixMask::constant(std::size_t width, std::size_t height, double gamma) {
    return MixMask{width, height, std::vector<double>(width * height, std::clamp(gamma, 0.0, 1.0))};
}

MixMask MixMask::from_field(const ScalarField& field) {
    MixMask mask{field.width, field.height, field.values};
    for (double& v : mask.values) v = std::clamp(v, 0.0, 1.0);
    return mask;
}

ImageBuffer apply(const WarpParameters& w, const ImageBuffer& img, unsigned threads) {
    check_space(w, img);
    const WarpKernel kernel(w);
    ImageBuffer out(img.width(), img.height(), img.space());
    const auto& src = img.pixels();
    auto& dst = out.pixels();
    const std::size_t width = img.width();
    const ColorSpace space = img.space();
    parallel_for(img.height(), threads, [&](std::size_t row_begin, std::size_t row_end) {
        std::vector<double> scratch(kernel.scratch_size());
        for (std::size_t i = row_begin * width; i < row_end * width; ++i) {
            dst[i] = clamp_to_gamut(kernel(src[i], scratch.data()), space);
        }
    });
    return out;
}

ImageBuffer apply_mixed(const WarpParameters& w1, const WarpParameters& w2, const MixMask& mask,
                        const ImageBuffer& img, unsigned threads) {
    if (!w1.same_family(w2)) throw DataError("cannot mix warps with different grids, basis functions or spaces");
    check_space(w1, img);
    if (mask.width != img.width() || mask.height != img.height() || mask.values.size() != img.size()) {
        throw DataError("mask is " + std::to_string(mask.width) + "x" + std::to_string(mask.height) + " but image is " +
                        std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }

    std::vector<double> levels = mask.values;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    ImageBuffer out(img.width(), img.height(), img.space());
    const auto& src = img.pixels();
    auto& dst = out.pixels();
    const std::size_t width = img.width();
    const ColorSpace space = img.space();

    if (levels.size() <= kMaxCachedGammas) {
        // Quantised masks: one mixed warp per distinct level.
        std::vector<WarpKernel> kernels;
        kernels.reserve(levels.size());
        for (double g : levels) kernels.emplace_back(mix_pair(w1, w2, g));
        parallel_for(img.height(), threads, [&](std::size_t row_begin, std::size_t row_end) {
            std::vector<double> scratch(w1.grid.size());
            for (std::size_t i = row_begin * width; i < row_end * width; ++i) {
                const auto level = static_cast<std::size_t>(
                    std::lower_bound(levels.begin(), levels.end(), mask.values[i]) - levels.begin());
                dst[i] = clamp_to_gamut(kernels[level](src[i], scratch.data()), space);
            }
        });
        return out;
    }

    parallel_for(img.height(), threads, [&](std::size_t row_begin, std::size_t row_end) {
        std::vector<double> scratch(w1.grid.size());
        for (std::size_t i = row_begin * width; i < row_end * width; ++i) {
            const WarpKernel kernel(mix_pair(w1, w2, mask.values[i]));
            dst[i] = clamp_to_gamut(kernel(src[i], scratch.data()), space);
        }
    });
    return out;
}

std::vector<ImageBuffer> apply_dissolve(const WarpParameters& w_from, const WarpParameters& w_to,
                                        std::span<const double> gammas, std::span<const ImageBuffer> frames,
                                        unsigned threads) {
    if (gammas.size() != frames.size()) {
        throw DataError("dissolve needs one gamma per frame (" + std::to_string(gammas.size()) + " gammas, " +
                        std::to_string(frames.size()) + " frames)");
    }
    if (!w_from.same_family(w_to)) throw DataError("cannot mix warps with different grids, basis functions or spaces");
    std::vector<ImageBuffer> out;
    out.reserve(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) out.push_back(apply(mix_pair(w_from, w_to, gammas[t]), frames[t], threads));
    return out;
}

ImageBuffer recolor_rgb(const WarpParameters& w, const ImageBuffer& rgb, unsigned threads) {
    if (rgb.space() != ColorSpace::RGB) throw DataError("recolor_rgb expects an RGB image");
    if (w.space == ColorSpace::RGB) return apply(w, rgb, threads);
    return to_space(apply(w, to_space(rgb, w.space), threads), ColorSpace::RGB);
}

}  // namespace l2t
