#include <random>

#include <benchmark/benchmark.h>

#include "l2t/clustering.hpp"
#include "l2t/estimator.hpp"
#include "l2t/recolor.hpp"
#include "scenes.hpp"

using namespace l2t;

namespace {

WarpParameters bench_warp(RbfKind kind) {
    const double eps = default_parameters(kind, ColorSpace::RGB, EstimationMode::NoCorrespondence).epsilon;
    WarpParameters w = identity_warp(ControlGrid(), {kind, eps});
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 0.02);
    for (Eigen::Index j = 0; j < w.W.cols(); ++j) w.W.col(j) = Color3(n(rng), n(rng), n(rng));
    return w;
}

const ImageBuffer& hd_image() {
    static const ImageBuffer img = testing::make_scene(1920, 1080, 3);
    return img;
}

void BM_RecolourHD(benchmark::State& state) {
    const auto kind = static_cast<RbfKind>(state.range(0));
    const WarpParameters w = bench_warp(kind);
    const ImageBuffer& img = hd_image();
    for (auto _ : state) benchmark::DoNotOptimize(apply(w, img, 0));
    state.SetLabel(std::string(to_string(kind)));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(img.size()));
}
BENCHMARK(BM_RecolourHD)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_CostGradient(benchmark::State& state) {
    const auto mode = static_cast<EstimationMode>(state.range(0));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t count = mode == EstimationMode::Correspondence ? 50000 : 50;
    std::vector<Color3> t(count), p(count);
    for (std::size_t k = 0; k < count; ++k) {
        t[k] = Color3(u(rng), u(rng), u(rng));
        p[k] = (0.9 * t[k] + Color3::Constant(0.05)).eval();
    }
    PairedGmms g;
    if (mode == EstimationMode::Correspondence) {
        CorrespondenceSet set;
        set.target = t;
        set.palette = p;
        set.locations.assign(count, {0, 0});
        g = make_paired(set, 0.25);
    } else {
        g = make_unpaired(t, p, 0.25);
    }
    const CostModel model(g, ControlGrid(), {}, mode, 3e-6);
    const WarpParameters w = bench_warp(RbfKind::ThinPlate);
    Eigen::VectorXd grad;
    for (auto _ : state) benchmark::DoNotOptimize(model.evaluate(w, 0.25, &grad));
    state.SetLabel(std::string(to_string(mode)));
}
BENCHMARK(BM_CostGradient)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_KMeans(benchmark::State& state) {
    const ImageBuffer small = downsample_for_clustering(hd_image(), 300, 350);
    for (auto _ : state) benchmark::DoNotOptimize(kmeans(small.pixels(), static_cast<std::size_t>(state.range(0)), 0));
}
BENCHMARK(BM_KMeans)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
