#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "l2t/clustering.hpp"
#include "l2t/error.hpp"
#include "scenes.hpp"

using namespace l2t;

namespace {

std::vector<Color3> random_points(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Color3> pts(n);
    for (auto& p : pts) p = Color3(u(rng), u(rng), u(rng));
    return pts;
}

}  // namespace

TEST_CASE("downsampling keeps aspect and fits the bounds") {
    const ImageBuffer big(600, 700, ColorSpace::RGB, Color3(0.1, 0.2, 0.3));
    const ImageBuffer small = downsample_for_clustering(big, 300, 350);
    CHECK(small.width() == 300);
    CHECK(small.height() == 350);

    const ImageBuffer fits(100, 100, ColorSpace::RGB, Color3(0.4, 0.4, 0.4));
    const ImageBuffer same = downsample_for_clustering(fits, 300, 350);
    CHECK(same.width() == 100);
    CHECK(same.pixels() == fits.pixels());

    const ImageBuffer wide(1920, 1080, ColorSpace::RGB);
    const ImageBuffer w = downsample_for_clustering(wide, 300, 350);
    CHECK(w.width() <= 300);
    CHECK(w.height() <= 350);
    CHECK(w.width() == 300);
}

TEST_CASE("downsampling a constant image keeps its colour") {
    const Color3 c(0.3, 0.6, 0.9);
    const ImageBuffer img(4, 4, ColorSpace::RGB, c);
    const ImageBuffer out = downsample_for_clustering(img, 2, 2);
    REQUIRE(out.width() == 2);
    REQUIRE(out.height() == 2);
    for (const auto& p : out.pixels()) CHECK((p - c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("downsampling averages boxes") {
    ImageBuffer img(4, 2, ColorSpace::RGB);
    for (std::size_t x = 0; x < 4; ++x)
        for (std::size_t y = 0; y < 2; ++y) img.at(x, y) = Color3::Constant(static_cast<double>(x));
    const ImageBuffer out = downsample_for_clustering(img, 2, 1);
    REQUIRE(out.width() == 2);
    CHECK(out.at(0, 0)[0] == doctest::Approx(0.5));
    CHECK(out.at(1, 0)[0] == doctest::Approx(2.5));
}

TEST_CASE("kmeans on four points finds the brute-force optimum") {
    const std::vector<Color3> pts = {Color3(0, 0, 0), Color3(0, 0, 0.1), Color3(1, 1, 1), Color3(0.9, 1, 1)};
    const ClusterModel model = kmeans(pts, 2, 3);
    REQUIRE(model.k == 2);
    std::vector<Color3> centers = model.centers;
    std::sort(centers.begin(), centers.end(), [](const Color3& a, const Color3& b) { return a[0] < b[0]; });
    CHECK((centers[0] - Color3(0, 0, 0.05)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((centers[1] - Color3(0.95, 1, 1)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(model.objective_history.back() == doctest::Approx(0.01));
}

TEST_CASE("kmeans with K=1 returns the centroid") {
    const auto pts = random_points(200, 11);
    Color3 mean = Color3::Zero();
    for (const auto& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    const ClusterModel model = kmeans(pts, 1, 0);
    REQUIRE(model.k == 1);
    CHECK((model.centers[0] - mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(model.counts[0] == 200);
}

TEST_CASE("kmeans reduces K to the number of distinct points") {
    const std::vector<Color3> pts(4, Color3(0.2, 0.3, 0.4));
    const ClusterModel model = kmeans(pts, 3, 0);
    CHECK(model.k == 1);
    CHECK(model.requested_k == 3);
    CHECK(model.centers[0] == Color3(0.2, 0.3, 0.4));
    CHECK_THROWS_AS(kmeans(std::vector<Color3>{}, 2, 0), InvalidArgument);
}

TEST_CASE("kmeans objective is non-increasing and assignments are optimal") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto pts = random_points(2000, 100 + seed);
        const ClusterModel model = kmeans(pts, 12, seed);
        for (std::size_t i = 1; i < model.objective_history.size(); ++i)
            CHECK(model.objective_history[i] <= model.objective_history[i - 1] + 1e-12);
        std::size_t total = 0;
        for (auto c : model.counts) total += c;
        CHECK(total == pts.size());
        if (model.iterations < 200) {
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double own = (pts[i] - model.centers[model.labels[i]]).squaredNorm();
                for (const auto& c : model.centers) CHECK(own <= (pts[i] - c).squaredNorm() + 1e-12);
            }
        }
    }
}

TEST_CASE("kmeans is deterministic and independent of thread count") {
    const auto pts = random_points(5000, 5);
    KMeansOptions one;
    one.threads = 1;
    KMeansOptions many;
    many.threads = 4;
    const ClusterModel a = kmeans(pts, 20, 42, one);
    const ClusterModel b = kmeans(pts, 20, 42, many);
    CHECK(a.centers == b.centers);
    CHECK(a.labels == b.labels);
    CHECK(a.objective_history == b.objective_history);
}

TEST_CASE("aligned identical images give zero-residual pairs") {
    const ImageBuffer img = testing::make_scene(2, 2, 1);
    const CorrespondenceSet set = sample_correspondences(img, img, 4, 0, 0);
    REQUIRE(set.size() == 4);
    std::set<std::pair<std::size_t, std::size_t>> locs(set.locations.begin(), set.locations.end());
    CHECK(locs.size() == 4);
    for (std::size_t k = 0; k < set.size(); ++k) CHECK(set.target[k] == set.palette[k]);

    const ImageBuffer scene = testing::make_scene(40, 30, 2);
    const CorrespondenceSet big = sample_correspondences(scene, scene, 500, 9, 0);
    for (std::size_t k = 0; k < big.size(); ++k) CHECK(big.target[k] == big.palette[k]);
}

TEST_CASE("shifted sampling stays in the overlap") {
    ImageBuffer target(10, 6, ColorSpace::RGB);
    ImageBuffer palette(10, 6, ColorSpace::RGB);
    for (std::size_t y = 0; y < 6; ++y)
        for (std::size_t x = 0; x < 10; ++x) {
            target.at(x, y) = Color3(x / 10.0, y / 10.0, 0);
            palette.at(x, y) = Color3(x / 10.0, y / 10.0, 1);
        }
    const CorrespondenceSet set = sample_correspondences(target, palette, 20, 4, 9);
    REQUIRE(set.size() == 20);
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto [x, y] = set.locations[k];
        CHECK(x == 9);
        CHECK(set.palette[k] == palette.at(x, y));
        CHECK(set.target[k] == target.at(x - 9, y));
    }
}

TEST_CASE("sampling is deterministic and validates its input") {
    const ImageBuffer a = testing::make_scene(32, 32, 3);
    const ImageBuffer b = testing::apply_reference_shift(a);
    const CorrespondenceSet s1 = sample_correspondences(a, b, 300, 77, 2);
    const CorrespondenceSet s2 = sample_correspondences(a, b, 300, 77, 2);
    CHECK(s1.locations == s2.locations);
    CHECK(s1.target == s2.target);

    const ImageBuffer other(31, 32, ColorSpace::RGB);
    CHECK_THROWS_AS(sample_correspondences(a, other, 10, 0, 0), DataError);
    CHECK_THROWS_AS(sample_correspondences(a, b, 0, 0, 0), InvalidArgument);
    CHECK_THROWS_AS(sample_correspondences(a, b, 10, 0, 32), InvalidArgument);
}
