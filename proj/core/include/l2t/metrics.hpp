#pragma once

#include <string>

#include "l2t/color.hpp"

namespace l2t {

inline constexpr double kPsnrCap = 100.0;

struct MetricReport {
    double psnr = 0.0;  // dB, capped at kPsnrCap
    double ssim = 0.0;
};

// 10 log10(1 / MSE) over every channel of normalised values.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

// Mean SSIM over all valid 11x11 windows of the Rec. 601 luma, Gaussian
// weights with sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

MetricReport evaluate_metrics(const ImageBuffer& result, const ImageBuffer& reference);

std::string format_report(const MetricReport& report);  // "psnr=<dB> ssim=<value>"

}  // namespace l2t
