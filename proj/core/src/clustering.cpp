#include "l2t/clustering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "l2t/error.hpp"
#include "l2t/parallel.hpp"

namespace l2t {

namespace {

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, bound) by rejection; independent of the
// standard library's distribution implementation.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r = rng();
    while (r >= limit) r = rng();
    return r % bound;
}

std::size_t count_distinct(std::span<const Color3> points) {
    std::vector<std::array<double, 3>> sorted(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) sorted[i] = {points[i][0], points[i][1], points[i][2]};
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

struct AxisWeights {
    std::vector<std::size_t> first;
    std::vector<std::vector<double>> weights;
};

// Area coverage of input cells [j, j+1) by output cell i spanning
// [i * ratio, (i + 1) * ratio).
AxisWeights area_weights(std::size_t in, std::size_t out) {
    AxisWeights aw;
    aw.first.resize(out);
    aw.weights.resize(out);
    const double ratio = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t i = 0; i < out; ++i) {
        const double lo = static_cast<double>(i) * ratio;
        const double hi = static_cast<double>(i + 1) * ratio;
        const auto j0 = static_cast<std::size_t>(std::floor(lo));
        const auto j1 = std::min(in, static_cast<std::size_t>(std::ceil(hi)));
        aw.first[i] = j0;
        double total = 0.0;
        for (std::size_t j = j0; j < j1; ++j) {
            const double w = std::min(hi, static_cast<double>(j + 1)) - std::max(lo, static_cast<double>(j));
            aw.weights[i].push_back(std::max(w, 0.0));
            total += aw.weights[i].back();
        }
        for (double& w : aw.weights[i]) w /= total;
    }
    return aw;
}

}  // namespace

ImageBuffer downsample_for_clustering(const ImageBuffer& img, std::size_t max_w, std::size_t max_h) {
    if (max_w == 0 || max_h == 0) throw InvalidArgument("downsample bounds must be positive");
    const std::size_t w = img.width();
    const std::size_t h = img.height();
    if (w <= max_w && h <= max_h) return img;

    const double scale = std::min(static_cast<double>(max_w) / static_cast<double>(w),
                                  static_cast<double>(max_h) / static_cast<double>(h));
    const std::size_t out_w = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::floor(static_cast<double>(w) * scale + 1e-9)), 1, max_w);
    const std::size_t out_h = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::floor(static_cast<double>(h) * scale + 1e-9)), 1, max_h);

    const AxisWeights wx = area_weights(w, out_w);
    const AxisWeights wy = area_weights(h, out_h);

    ImageBuffer horizontal(out_w, h, img.space());
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < out_w; ++x) {
            Color3 acc = Color3::Zero();
            for (std::size_t t = 0; t < wx.weights[x].size(); ++t) acc += wx.weights[x][t] * img.at(wx.first[x] + t, y);
            horizontal.at(x, y) = acc;
        }
    }
    ImageBuffer out(out_w, out_h, img.space());
    for (std::size_t y = 0; y < out_h; ++y) {
        for (std::size_t x = 0; x < out_w; ++x) {
            Color3 acc = Color3::Zero();
            for (std::size_t t = 0; t < wy.weights[y].size(); ++t) acc += wy.weights[y][t] * horizontal.at(x, wy.first[y] + t);
            out.at(x, y) = acc;
        }
    }
    return out;
}

ClusterModel kmeans(std::span<const Color3> points, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    if (points.empty()) throw InvalidArgument("kmeans: empty input");
    if (k == 0) throw InvalidArgument("kmeans: K must be at least 1");

    const std::size_t n = points.size();
    ClusterModel model;
    model.requested_k = k;
    model.k = std::min(k, count_distinct(points));
    k = model.k;

    // k-means++ seeding.
    std::mt19937_64 rng(seed);
    std::vector<Color3> centers;
    centers.reserve(k);
    centers.push_back(points[uniform_index(rng, n)]);
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = (points[i] - centers[0]).squaredNorm();
    while (centers.size() < k) {
        const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
        const double target = unit_uniform(rng) * total;
        double running = 0.0;
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (nearest[i] <= 0.0) continue;
            running += nearest[i];
            pick = i;
            if (running > target) break;
        }
        centers.push_back(points[pick]);
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], (points[i] - centers.back()).squaredNorm());
    }

    std::vector<std::size_t> labels(n, k);
    std::vector<std::size_t> previous;
    std::vector<double> dist(n);
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        previous = labels;
        parallel_for(n, options.threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                double best = std::numeric_limits<double>::infinity();
                std::size_t arg = 0;
                for (std::size_t c = 0; c < k; ++c) {
                    const double d = (points[i] - centers[c]).squaredNorm();
                    if (d < best) {
                        best = d;
                        arg = c;
                    }
                }
                labels[i] = arg;
                dist[i] = best;
            }
        });
        double objective = 0.0;
        for (double d : dist) objective += d;
        model.objective_history.push_back(objective);
        model.iterations = iter + 1;

        if (labels == previous) break;
        if (model.objective_history.size() > 1) {
            const double before = model.objective_history[model.objective_history.size() - 2];
            if (before - objective <= options.relative_tolerance * before) break;
        }
        if (iter + 1 == options.max_iterations) break;

        std::vector<Color3> sums(k, Color3::Zero());
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[labels[i]] += points[i];
            ++counts[labels[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centers[c] = sums[c] / static_cast<double>(counts[c]);
                continue;
            }
            // Empty cluster: move it to the point worst served by its centre.
            const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
            centers[c] = points[far];
            dist[far] = 0.0;
        }
    }

    model.counts.assign(k, 0);
    for (std::size_t l : labels) ++model.counts[l];
    model.centers = std::move(centers);
    model.labels = std::move(labels);
    return model;
}

CorrespondenceSet sample_correspondences(const ImageBuffer& target, const ImageBuffer& palette_aligned,
                                         std::size_t n, std::uint64_t seed, std::size_t shift_px) {
    if (!target.same_shape(palette_aligned)) {
        throw DataError("correspondence sampling needs images of equal size (target " +
                        std::to_string(target.width()) + "x" + std::to_string(target.height()) + ", palette " +
                        std::to_string(palette_aligned.width()) + "x" + std::to_string(palette_aligned.height()) + ")");
    }
    if (target.space() != palette_aligned.space()) throw DataError("target and palette colour spaces differ");
    if (n == 0) throw InvalidArgument("correspondence count must be at least 1");
    if (target.empty()) throw DataError("cannot sample correspondences from an empty image");
    if (shift_px >= target.width()) {
        throw InvalidArgument("shift of " + std::to_string(shift_px) + " px leaves no overlap in a " +
                              std::to_string(target.width()) + "-pixel-wide image");
    }

    const std::size_t overlap_w = target.width() - shift_px;
    const std::size_t area = overlap_w * target.height();
    std::mt19937_64 rng(seed);

    std::vector<std::size_t> picks;
    picks.reserve(n);
    if (n <= area) {
        std::vector<std::size_t> order(area);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, area - i));
            std::swap(order[i], order[j]);
            picks.push_back(order[i]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) picks.push_back(static_cast<std::size_t>(uniform_index(rng, area)));
    }

    CorrespondenceSet set;
    set.seed = seed;
    set.target.reserve(n);
    set.palette.reserve(n);
    set.locations.reserve(n);
    for (std::size_t idx : picks) {
        const std::size_t x = shift_px + idx % overlap_w;
        const std::size_t y = idx / overlap_w;
        set.target.push_back(target.at(x - shift_px, y));
        set.palette.push_back(palette_aligned.at(x, y));
        set.locations.emplace_back(x, y);
    }
    return set;
}

}  // namespace l2t
