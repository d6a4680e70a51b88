#pragma once

#include <filesystem>
#include <vector>

#include "l2t/color.hpp"

namespace l2t {

// Reads a PNG or JPEG into a normalised RGB buffer. 8-bit channels are
// divided by 255, 16-bit PNG channels by 65535. Greyscale is replicated
// to three channels and alpha is dropped. Throws DataError naming the path.
ImageBuffer load_image(const std::filesystem::path& path);

// Writes an 8-bit PNG or JPEG (chosen by extension). Lab buffers are
// converted to RGB first; channels are clamped to [0,1] and rounded.
void save_image(const ImageBuffer& img, const std::filesystem::path& path);

struct ScalarField {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values;
};

// Greyscale mask in [0,1]: single-channel images map linearly, colour
// images use Rec. 601 luma.
ScalarField load_scalar_field(const std::filesystem::path& path);

// Image files of a directory (png/jpg/jpeg), sorted lexicographically.
std::vector<std::filesystem::path> list_image_files(const std::filesystem::path& dir);

bool has_image_extension(const std::filesystem::path& path);

}  // namespace l2t
