#include "l2t/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "l2t/error.hpp"

namespace l2t {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void check_pair(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b)) {
        throw DataError("image sizes differ: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                        std::to_string(b.width()) + "x" + std::to_string(b.height()));
    }
    if (a.space() != b.space()) throw DataError("images are in different colour spaces");
}

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> taps{};
    double total = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        total += taps[static_cast<std::size_t>(i)];
    }
    for (double& t : taps) t /= total;
    return taps;
}

// Valid-region separable filter: output is (w - 10) x (h - 10).
std::vector<double> filter_valid(const std::vector<double>& in, std::size_t w, std::size_t h,
                                 const std::array<double, kWindow>& taps) {
    const std::size_t ow = w - kWindow + 1;
    const std::size_t oh = h - kWindow + 1;
    std::vector<double> tmp(ow * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t t = 0; t < kWindow; ++t) acc += taps[t] * in[y * w + x + t];
            tmp[y * ow + x] = acc;
        }
    }
    std::vector<double> out(ow * oh);
    for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t t = 0; t < kWindow; ++t) acc += taps[t] * tmp[(y + t) * ow + x];
            out[y * ow + x] = acc;
        }
    }
    return out;
}

std::vector<double> luma(const ImageBuffer& img) {
    std::vector<double> y(img.size());
    const auto& px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) y[i] = 0.299 * px[i][0] + 0.587 * px[i][1] + 0.114 * px[i][2];
    return y;
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    check_pair(a, b);
    if (a.empty()) throw DataError("cannot compute PSNR of empty images");
    double sum = 0.0;
    const auto& pa = a.pixels();
    const auto& pb = b.pixels();
    for (std::size_t i = 0; i < pa.size(); ++i) sum += (pa[i] - pb[i]).squaredNorm();
    const double mse = sum / (3.0 * static_cast<double>(pa.size()));
    if (mse <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    check_pair(a, b);
    if (a.width() < kWindow || a.height() < kWindow) {
        throw DataError("SSIM needs images of at least 11x11 pixels, got " + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()));
    }
    const auto taps = gaussian_taps();
    const std::size_t w = a.width();
    const std::size_t h = a.height();
    const std::vector<double> ya = luma(a);
    const std::vector<double> yb = luma(b);
    std::vector<double> aa(ya.size()), bb(ya.size()), ab(ya.size());
    for (std::size_t i = 0; i < ya.size(); ++i) {
        aa[i] = ya[i] * ya[i];
        bb[i] = yb[i] * yb[i];
        ab[i] = ya[i] * yb[i];
    }
    const auto mu_a = filter_valid(ya, w, h, taps);
    const auto mu_b = filter_valid(yb, w, h, taps);
    const auto e_aa = filter_valid(aa, w, h, taps);
    const auto e_bb = filter_valid(bb, w, h, taps);
    const auto e_ab = filter_valid(ab, w, h, taps);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i];
        const double mb = mu_b[i];
        const double va = e_aa[i] - ma * ma;
        const double vb = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) / ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
    }
    return total / static_cast<double>(mu_a.size());
}

MetricReport evaluate_metrics(const ImageBuffer& result, const ImageBuffer& reference) {
    return MetricReport{psnr(result, reference), ssim(result, reference)};
}

std::string format_report(const MetricReport& report) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "psnr=%.4f ssim=%.6f", report.psnr, report.ssim);
    return buf;
}

}  // namespace l2t
