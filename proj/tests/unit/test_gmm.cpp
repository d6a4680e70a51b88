#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "l2t/error.hpp"
#include "l2t/gmm.hpp"
#include "oracles.hpp"

using namespace l2t;

namespace {

const double kSelf = std::pow(4.0 * std::numbers::pi, -1.5);

std::vector<Color3> random_means(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Color3> pts(n);
    for (auto& p : pts) p = Color3(u(rng), u(rng), u(rng));
    return pts;
}

// Plain double loop with the closed form written out again.
double brute_pair_sum(const std::vector<Color3>& a, const std::vector<Color3>& b, double h) {
    double s = 0.0;
    for (const auto& x : a)
        for (const auto& y : b)
            s += std::pow(4.0 * std::numbers::pi * h * h, -1.5) * std::exp(-(x - y).squaredNorm() / (4.0 * h * h));
    return s / static_cast<double>(a.size() * b.size());
}

WarpParameters identity() { return identity_warp(ControlGrid(), RadialBasis{}); }

}  // namespace

TEST_CASE("scalar product of coincident unit Gaussians") {
    const double v = gaussian_scalar_product(Color3::Zero(), Color3::Zero(), 1.0);
    CHECK(v == doctest::Approx(0.022448390265645834).epsilon(1e-14));
    const double quad = testing::gaussian_product_quadrature(Color3::Zero(), Color3::Zero(), 1.0, 121);
    CHECK(std::abs(v - quad) / quad < 1e-3);
}

TEST_CASE("scalar product is symmetric, decays and rejects bad h") {
    std::mt19937_64 rng(1);
    const auto pts = random_means(20, rng);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        CHECK(gaussian_scalar_product(pts[i], pts[i + 1], 0.3) == gaussian_scalar_product(pts[i + 1], pts[i], 0.3));
    }
    CHECK(gaussian_scalar_product(Color3::Zero(), Color3(20.0, 0, 0), 1.0) < 1e-40);
    CHECK(gaussian_scalar_product(Color3::Zero(), Color3(0.1, 0, 0), 0.002) < 1e-40);
    CHECK_THROWS_AS(gaussian_scalar_product(Color3::Zero(), Color3::Zero(), 0.0), InvalidArgument);
    CHECK_THROWS_AS(gaussian_scalar_product(Color3::Zero(), Color3::Zero(), -1.0), InvalidArgument);
}

TEST_CASE("scalar products fall off as h^-3") {
    const Color3 a(0.1, 0.2, 0.3), b(0.4, 0.1, 0.0);
    const double v1 = gaussian_scalar_product(a, b, 100.0);
    const double v2 = gaussian_scalar_product(a, b, 200.0);
    CHECK(v1 / v2 == doctest::Approx(8.0).epsilon(1e-4));
}

TEST_CASE("paired cross term with one identical pair") {
    CorrespondenceSet set;
    set.target = {Color3(0.3, 0.3, 0.3)};
    set.palette = {Color3(0.3, 0.3, 0.3)};
    set.locations = {{0, 0}};
    const PairedGmms g = make_paired(set, 1.0);
    CHECK(g.paired);
    CHECK(cross_term(g, identity()) == doctest::Approx(kSelf).epsilon(1e-13));
}

TEST_CASE("unpaired cross and entropy terms match termwise sums") {
    std::mt19937_64 rng(2);
    const std::vector<Color3> two = random_means(2, rng);
    const PairedGmms g2 = make_unpaired(two, two, 0.4);
    CHECK(cross_term(g2, identity()) == doctest::Approx(brute_pair_sum(two, two, 0.4)).epsilon(1e-13));

    const std::vector<Color3> three = random_means(3, rng);
    const IsotropicGmm t{three, 0.25};
    CHECK(entropy_term(t, identity()) == doctest::Approx(brute_pair_sum(three, three, 0.25)).epsilon(1e-13));

    const IsotropicGmm single{{Color3(0.7, 0.1, 0.5)}, 1.0};
    WarpParameters w = identity();
    w.A << 2, 0.1, 0, 0, 1, 0, 0.3, 0, 1;
    w.o = Color3(0.2, -0.1, 0.4);
    CHECK(entropy_term(single, w) == doctest::Approx(kSelf).epsilon(1e-13));
}

TEST_CASE("entropy is invariant under permutation of means") {
    std::mt19937_64 rng(3);
    std::vector<Color3> means = random_means(9, rng);
    const double before = entropy_term({means, 0.2}, identity());
    std::shuffle(means.begin(), means.end(), rng);
    CHECK(entropy_term({means, 0.2}, identity()) == doctest::Approx(before).epsilon(1e-14));
}

TEST_CASE("paired cross term is K times the diagonal of the unpaired sum") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial);
        const auto t = random_means(n, rng);
        const auto p = random_means(n, rng);
        CorrespondenceSet set;
        set.target = t;
        set.palette = p;
        set.locations.assign(n, {0, 0});
        const double h = 0.3;
        const double paired = cross_term(make_paired(set, h), identity());
        double diag = 0.0;
        for (std::size_t k = 0; k < n; ++k) diag += gaussian_scalar_product(t[k], p[k], h);
        diag /= static_cast<double>(n * n);
        CHECK(paired == doctest::Approx(static_cast<double>(n) * diag).epsilon(1e-12));
    }
}

TEST_CASE("the L2 distance between mixtures is non-negative") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = random_means(4 + trial % 5, rng);
        const auto p = random_means(3 + trial % 4, rng);
        const double h = 0.05 + 0.05 * trial;
        const PairedGmms g = make_unpaired(t, p, h);
        const double d = entropy_term(g.target, identity()) - 2.0 * cross_term(g, identity()) +
                         entropy_term(g.palette, identity());
        CHECK(d >= -1e-12);
    }
}

TEST_CASE("a single-component cross term peaks at zero translation") {
    const Color3 mu(0.4, 0.5, 0.6);
    const PairedGmms g = make_unpaired({mu}, {mu}, 0.2);
    WarpParameters w = identity();
    const double peak = cross_term(g, w);
    for (const Color3 t : {Color3(0.01, 0, 0), Color3(0, -0.2, 0), Color3(0.1, 0.1, 0.1)}) {
        w.o = t;
        CHECK(cross_term(g, w) < peak);
    }
}

TEST_CASE("kernel sum gradients match finite differences") {
    std::mt19937_64 rng(6);
    const auto warped = random_means(6, rng);
    const auto palette = random_means(5, rng);
    const double h = 0.3;
    std::vector<Color3> g(warped.size());
    entropy_sum(warped, h, g);
    std::vector<Color3> probe = warped;
    for (std::size_t k = 0; k < warped.size(); ++k)
        for (int c = 0; c < 3; ++c) {
            probe[k][c] += 1e-6;
            const double up = entropy_sum(probe, h);
            probe[k][c] -= 2e-6;
            const double down = entropy_sum(probe, h);
            probe[k][c] += 1e-6;
            CHECK(g[k][c] == doctest::Approx((up - down) / 2e-6).epsilon(1e-6));
        }
    cross_sum(warped, palette, h, false, g);
    for (std::size_t k = 0; k < warped.size(); ++k)
        for (int c = 0; c < 3; ++c) {
            probe[k][c] += 1e-6;
            const double up = cross_sum(probe, palette, h, false);
            probe[k][c] -= 2e-6;
            const double down = cross_sum(probe, palette, h, false);
            probe[k][c] += 1e-6;
            CHECK(g[k][c] == doctest::Approx((up - down) / 2e-6).epsilon(1e-6));
        }
}

TEST_CASE("residual entropy is the self product") {
    CHECK(residual_entropy(1.0) == gaussian_scalar_product(Color3::Zero(), Color3::Zero(), 1.0));
    CHECK(residual_entropy(0.5) == doctest::Approx(kSelf * 8.0));
}
