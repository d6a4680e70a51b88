#include "l2t/color.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "l2t/error.hpp"

namespace l2t {

namespace {

// sRGB (linear) -> XYZ, IEC 61966-2-1, D65.
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// Exact inverse of the matrix above, so that conversions round-trip to
// machine precision (the published 7-digit inverse is off by ~1e-7).
const Eigen::Matrix3d& xyz_to_rgb() {
    static const Eigen::Matrix3d inv = [] {
        Eigen::Matrix3d m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = kRgbToXyz[i][j];
        return Eigen::Matrix3d(m.inverse());
    }();
    return inv;
}

constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = 1.08883;

constexpr double kDelta = 6.0 / 29.0;

double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
    return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double t) {
    return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

}  // namespace

std::string_view to_string(ColorSpace space) {
    return space == ColorSpace::RGB ? "rgb" : "lab";
}

ColorSpace color_space_from_string(std::string_view name) {
    if (name == "rgb") return ColorSpace::RGB;
    if (name == "lab") return ColorSpace::Lab;
    throw InvalidArgument("unknown colour space '" + std::string(name) + "'");
}

Color3 rgb_to_lab(const Color3& rgb) {
    const double r = srgb_to_linear(rgb[0]);
    const double g = srgb_to_linear(rgb[1]);
    const double b = srgb_to_linear(rgb[2]);
    const double x = kRgbToXyz[0][0] * r + kRgbToXyz[0][1] * g + kRgbToXyz[0][2] * b;
    const double y = kRgbToXyz[1][0] * r + kRgbToXyz[1][1] * g + kRgbToXyz[1][2] * b;
    const double z = kRgbToXyz[2][0] * r + kRgbToXyz[2][1] * g + kRgbToXyz[2][2] * b;
    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Color3 lab_to_rgb(const Color3& lab) {
    const double fy = (lab[0] + 16.0) / 116.0;
    const double fx = fy + lab[1] / 500.0;
    const double fz = fy - lab[2] / 200.0;
    const double x = kWhiteX * lab_f_inv(fx);
    const double y = kWhiteY * lab_f_inv(fy);
    const double z = kWhiteZ * lab_f_inv(fz);
    const Eigen::Matrix3d& m = xyz_to_rgb();
    Color3 out;
    for (int i = 0; i < 3; ++i) {
        const double lin = m(i, 0) * x + m(i, 1) * y + m(i, 2) * z;
        out[i] = std::clamp(linear_to_srgb(std::max(lin, 0.0)), 0.0, 1.0);
    }
    return out;
}

Color3 normalise_lab(const Color3& lab) {
    return {lab[0] / 100.0, lab[1] / 128.0, lab[2] / 128.0};
}

Color3 denormalise_lab(const Color3& scaled) {
    return {scaled[0] * 100.0, scaled[1] * 128.0, scaled[2] * 128.0};
}

Color3 clamp_to_gamut(const Color3& c, ColorSpace space) {
    if (space == ColorSpace::RGB) {
        return {std::clamp(c[0], 0.0, 1.0), std::clamp(c[1], 0.0, 1.0), std::clamp(c[2], 0.0, 1.0)};
    }
    return {std::clamp(c[0], 0.0, 1.0), std::clamp(c[1], -1.0, 1.0), std::clamp(c[2], -1.0, 1.0)};
}

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, ColorSpace space, const Color3& fill)
    : width_(width), height_(height), space_(space), pixels_(width * height, fill) {}

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, ColorSpace space,
                         std::vector<Color3> pixels)
    : width_(width), height_(height), space_(space), pixels_(std::move(pixels)) {
    if (pixels_.size() != width_ * height_) {
        throw InvalidArgument("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                              std::to_string(width_) + "x" + std::to_string(height_));
    }
}

ImageBuffer to_space(const ImageBuffer& img, ColorSpace target) {
    if (img.space() == target) return img;
    ImageBuffer out(img.width(), img.height(), target);
    const auto& src = img.pixels();
    auto& dst = out.pixels();
    if (target == ColorSpace::Lab) {
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = normalise_lab(rgb_to_lab(src[i]));
    } else {
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lab_to_rgb(denormalise_lab(src[i]));
    }
    return out;
}

ImageBuffer clamp_unit(const ImageBuffer& img) {
    ImageBuffer out = img;
    for (auto& p : out.pixels()) p = p.cwiseMax(0.0).cwiseMin(1.0);
    return out;
}

}  // namespace l2t
