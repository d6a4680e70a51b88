#include "l2t/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "l2t/error.hpp"

namespace l2t {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

cv::Mat read_raw(const fs::path& path) {
    if (!has_image_extension(path)) {
        throw DataError("cannot read image '" + path.string() + "': unsupported format '" +
                        path.extension().string() + "' (expected png or jpeg)");
    }
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw DataError("cannot read image '" + path.string() + "': no such file");
    }
    cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (raw.empty()) {
        throw DataError("cannot read image '" + path.string() + "': decoder rejected the file");
    }
    if (raw.depth() != CV_8U && raw.depth() != CV_16U) {
        throw DataError("cannot read image '" + path.string() + "': unsupported bit depth");
    }
    return raw;
}

double channel_scale(const cv::Mat& m) { return m.depth() == CV_16U ? 1.0 / 65535.0 : 1.0 / 255.0; }

double read_channel(const cv::Mat& m, int row, int col, int ch) {
    const int nch = m.channels();
    if (m.depth() == CV_16U) return m.ptr<std::uint16_t>(row)[col * nch + ch];
    return m.ptr<std::uint8_t>(row)[col * nch + ch];
}

}  // namespace

bool has_image_extension(const fs::path& path) {
    const std::string ext = lower_extension(path);
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

ImageBuffer load_image(const fs::path& path) {
    const cv::Mat raw = read_raw(path);
    const double scale = channel_scale(raw);
    const int nch = raw.channels();
    ImageBuffer img(static_cast<std::size_t>(raw.cols), static_cast<std::size_t>(raw.rows), ColorSpace::RGB);
    for (int y = 0; y < raw.rows; ++y) {
        for (int x = 0; x < raw.cols; ++x) {
            Color3& px = img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
            if (nch < 3) {
                px.setConstant(read_channel(raw, y, x, 0) * scale);
            } else {
                // OpenCV stores BGR(A).
                px[0] = read_channel(raw, y, x, 2) * scale;
                px[1] = read_channel(raw, y, x, 1) * scale;
                px[2] = read_channel(raw, y, x, 0) * scale;
            }
        }
    }
    return img;
}

void save_image(const ImageBuffer& img, const fs::path& path) {
    if (!has_image_extension(path)) {
        throw DataError("cannot write image '" + path.string() + "': unsupported format '" +
                        path.extension().string() + "' (expected png or jpeg)");
    }
    const ImageBuffer rgb = to_space(img, ColorSpace::RGB);
    cv::Mat out(static_cast<int>(rgb.height()), static_cast<int>(rgb.width()), CV_8UC3);
    for (std::size_t y = 0; y < rgb.height(); ++y) {
        auto* row = out.ptr<std::uint8_t>(static_cast<int>(y));
        for (std::size_t x = 0; x < rgb.width(); ++x) {
            const Color3& c = rgb.at(x, y);
            for (int ch = 0; ch < 3; ++ch) {
                const double v = std::clamp(c[2 - ch], 0.0, 1.0);
                row[x * 3 + static_cast<std::size_t>(ch)] = static_cast<std::uint8_t>(std::lround(v * 255.0));
            }
        }
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), out);
    } catch (const cv::Exception& e) {
        throw DataError("cannot write image '" + path.string() + "': " + e.what());
    }
    if (!ok) throw DataError("cannot write image '" + path.string() + "': encoder failed");
}

ScalarField load_scalar_field(const fs::path& path) {
    const cv::Mat raw = read_raw(path);
    const double scale = channel_scale(raw);
    const int nch = raw.channels();
    ScalarField field;
    field.width = static_cast<std::size_t>(raw.cols);
    field.height = static_cast<std::size_t>(raw.rows);
    field.values.resize(field.width * field.height);
    for (int y = 0; y < raw.rows; ++y) {
        for (int x = 0; x < raw.cols; ++x) {
            double v = 0.0;
            if (nch < 3) {
                v = read_channel(raw, y, x, 0) * scale;
            } else {
                v = (0.299 * read_channel(raw, y, x, 2) + 0.587 * read_channel(raw, y, x, 1) +
                     0.114 * read_channel(raw, y, x, 0)) * scale;
            }
            field.values[static_cast<std::size_t>(y) * field.width + static_cast<std::size_t>(x)] =
                std::clamp(v, 0.0, 1.0);
        }
    }
    return field;
}

std::vector<fs::path> list_image_files(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw DataError("'" + dir.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

}  // namespace l2t
