#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "l2t/color.hpp"

namespace l2t {

// K-means result. `k` may be smaller than `requested_k` when the input has
// fewer distinct points than requested.
struct ClusterModel {
    std::vector<Color3> centers;
    std::vector<std::size_t> counts;
    std::vector<std::size_t> labels;
    std::size_t k = 0;
    std::size_t requested_k = 0;
    std::vector<double> objective_history;  // SSE after each assignment step
    std::size_t iterations = 0;
};

struct KMeansOptions {
    std::size_t max_iterations = 200;
    double relative_tolerance = 1e-6;
    unsigned threads = 1;
};

// Paired colour samples from aligned target/palette images, stored as two
// index-aligned arrays. `locations` holds the palette pixel (x, y) of each pair.
struct CorrespondenceSet {
    std::vector<Color3> target;
    std::vector<Color3> palette;
    std::vector<std::pair<std::size_t, std::size_t>> locations;
    std::uint64_t seed = 0;
    std::size_t size() const { return target.size(); }
};

// Aspect-preserving area-average downsample so that the result fits in
// max_w x max_h. Returns a copy when the image already fits.
ImageBuffer downsample_for_clustering(const ImageBuffer& img, std::size_t max_w, std::size_t max_h);

// Lloyd iterations from a seeded k-means++ start. Stops when assignments
// stop changing, when the relative objective change drops below
// `relative_tolerance`, or after `max_iterations`.
ClusterModel kmeans(std::span<const Color3> points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

// Draws n pixel locations from the overlap of the target shifted right by
// `shift_px` and the palette. Pair k is (target(x - shift, y), palette(x, y)).
// Sampling is without replacement unless n exceeds the overlap area.
CorrespondenceSet sample_correspondences(const ImageBuffer& target, const ImageBuffer& palette_aligned,
                                         std::size_t n, std::uint64_t seed, std::size_t shift_px);

}  // namespace l2t
