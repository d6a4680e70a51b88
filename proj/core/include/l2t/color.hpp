#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace l2t {

using Color3 = Eigen::Vector3d;

enum class ColorSpace { RGB, Lab };

std::string_view to_string(ColorSpace space);
ColorSpace color_space_from_string(std::string_view name);

// sRGB in [0,1] -> CIELAB (D65), L in [0,100], a/b roughly [-128,127].
Color3 rgb_to_lab(const Color3& rgb);
// CIELAB (D65) -> sRGB, clamped to [0,1] per channel.
Color3 lab_to_rgb(const Color3& lab);

// Working-space scaling for Lab: L/100, a/128, b/128. RGB is already in [0,1].
Color3 normalise_lab(const Color3& lab);
Color3 denormalise_lab(const Color3& scaled);

// Per-channel clamp to the valid normalised range of `space`
// ([0,1] for RGB; [0,1] x [-1,1] x [-1,1] for scaled Lab).
Color3 clamp_to_gamut(const Color3& c, ColorSpace space);

/// Dense row-major raster of normalised colour triples.
///
/// RGB buffers hold [0,1] channels. Lab buffers hold scaled Lab
/// (see normalise_lab), which is the space the estimator works in.
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(std::size_t width, std::size_t height, ColorSpace space,
                const Color3& fill = Color3::Zero());
    ImageBuffer(std::size_t width, std::size_t height, ColorSpace space,
                std::vector<Color3> pixels);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t size() const { return pixels_.size(); }
    bool empty() const { return pixels_.empty(); }
    ColorSpace space() const { return space_; }

    const Color3& at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
    Color3& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }

    const std::vector<Color3>& pixels() const { return pixels_; }
    std::vector<Color3>& pixels() { return pixels_; }

    bool same_shape(const ImageBuffer& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    ColorSpace space_ = ColorSpace::RGB;
    std::vector<Color3> pixels_;
};

// Whole-buffer conversions between RGB and scaled Lab. Converting a buffer
// to its own space returns a copy.
ImageBuffer to_space(const ImageBuffer& img, ColorSpace target);

// Clamp every channel to [0,1]; idempotent.
ImageBuffer clamp_unit(const ImageBuffer& img);

}  // namespace l2t
