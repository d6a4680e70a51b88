#include "l2t/warp.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "l2t/error.hpp"

namespace l2t {

namespace {

constexpr std::string_view kMagic = "l2t-warp";
constexpr int kFormatVersion = 1;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view token, std::size_t line) {
    std::string s(token);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
        throw DataError("warp file line " + std::to_string(line) + ": malformed number '" + s + "'");
    }
    return v;
}

}  // namespace

std::string_view to_string(RbfKind kind) {
    switch (kind) {
        case RbfKind::ThinPlate: return "tps";
        case RbfKind::Gaussian: return "gaussian";
        case RbfKind::InverseMultiquadric: return "imq";
        case RbfKind::InverseQuadric: return "iq";
    }
    return "tps";
}

RbfKind rbf_kind_from_string(std::string_view name) {
    if (name == "tps") return RbfKind::ThinPlate;
    if (name == "gaussian") return RbfKind::Gaussian;
    if (name == "imq") return RbfKind::InverseMultiquadric;
    if (name == "iq") return RbfKind::InverseQuadric;
    throw InvalidArgument("unknown radial basis '" + std::string(name) + "'");
}

double RadialBasis::operator()(double r) const {
    switch (kind) {
        case RbfKind::ThinPlate: return -r;
        case RbfKind::Gaussian: {
            const double er = epsilon * r;
            return std::exp(-er * er);
        }
        case RbfKind::InverseMultiquadric: {
            const double er = epsilon * r;
            return 1.0 / std::sqrt(1.0 + er * er);
        }
        case RbfKind::InverseQuadric: {
            const double er = epsilon * r;
            return 1.0 / (1.0 + er * er);
        }
    }
    return 0.0;
}

double rbf_eval(const RadialBasis& rbf, double r) { return rbf(r); }

ControlGrid::ControlGrid() : ControlGrid(5, Color3::Zero(), Color3::Ones()) {}

ControlGrid::ControlGrid(std::size_t per_axis, const Color3& lower, const Color3& upper)
    : per_axis_(per_axis), lower_(lower), upper_(upper) {
    if (per_axis < 2) throw InvalidArgument("control grid needs at least 2 points per axis");
    if (!(upper.array() > lower.array()).all()) throw InvalidArgument("control grid box is empty");
    points_.resize(3, static_cast<Eigen::Index>(size()));
    const double denom = static_cast<double>(per_axis - 1);
    Eigen::Index j = 0;
    for (std::size_t i0 = 0; i0 < per_axis; ++i0) {
        for (std::size_t i1 = 0; i1 < per_axis; ++i1) {
            for (std::size_t i2 = 0; i2 < per_axis; ++i2) {
                const Color3 t(static_cast<double>(i0) / denom, static_cast<double>(i1) / denom,
                               static_cast<double>(i2) / denom);
                points_.col(j++) = lower + t.cwiseProduct(upper - lower);
            }
        }
    }
}

ControlGrid ControlGrid::for_space(ColorSpace space, std::size_t per_axis) {
    if (space == ColorSpace::RGB) return ControlGrid(per_axis, Color3::Zero(), Color3::Ones());
    return ControlGrid(per_axis, Color3(0.0, -1.0, -1.0), Color3(1.0, 1.0, 1.0));
}

Eigen::VectorXd WarpParameters::pack() const {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(parameter_count()));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) theta[r * 3 + c] = A(r, c);
    theta.segment<3>(9) = o;
    theta.tail(W.size()) = Eigen::Map<const Eigen::VectorXd>(W.data(), W.size());
    return theta;
}

void WarpParameters::unpack(std::span<const double> theta) {
    if (theta.size() != parameter_count()) {
        throw InvalidArgument("parameter vector has " + std::to_string(theta.size()) + " entries, expected " +
                              std::to_string(parameter_count()));
    }
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) A(r, c) = theta[static_cast<std::size_t>(r * 3 + c)];
    o = Eigen::Vector3d(theta[9], theta[10], theta[11]);
    W.resize(3, static_cast<Eigen::Index>(grid.size()));
    std::copy(theta.begin() + 12, theta.end(), W.data());
}

Eigen::VectorXd basis_vector(const ControlGrid& grid, const RadialBasis& rbf, const Color3& x) {
    Eigen::VectorXd psi(static_cast<Eigen::Index>(grid.size()));
    const auto& pts = grid.points();
    for (Eigen::Index j = 0; j < psi.size(); ++j) psi[j] = rbf((x - pts.col(j)).norm());
    return psi;
}

WarpKernel::WarpKernel(const WarpParameters& w) : A_(w.A), o_(w.o), W_(w.W), rbf_(w.rbf) {
    const auto& pts = w.grid.points();
    const auto m = static_cast<std::size_t>(pts.cols());
    if (static_cast<std::size_t>(W_.cols()) != m) throw InvalidArgument("W does not match the control grid");
    cx_.resize(m);
    cy_.resize(m);
    cz_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        cx_[j] = pts(0, static_cast<Eigen::Index>(j));
        cy_[j] = pts(1, static_cast<Eigen::Index>(j));
        cz_[j] = pts(2, static_cast<Eigen::Index>(j));
    }
}

Color3 WarpKernel::operator()(const Color3& x, double* psi) const {
    const std::size_t m = cx_.size();
    const double x0 = x[0], x1 = x[1], x2 = x[2];
    for (std::size_t j = 0; j < m; ++j) {
        const double dx = x0 - cx_[j];
        const double dy = x1 - cy_[j];
        const double dz = x2 - cz_[j];
        psi[j] = std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    const double eps = rbf_.epsilon;
    switch (rbf_.kind) {
        case RbfKind::ThinPlate:
            for (std::size_t j = 0; j < m; ++j) psi[j] = -psi[j];
            break;
        case RbfKind::Gaussian:
            for (std::size_t j = 0; j < m; ++j) {
                const double er = eps * psi[j];
                psi[j] = std::exp(-er * er);
            }
            break;
        case RbfKind::InverseMultiquadric:
            for (std::size_t j = 0; j < m; ++j) {
                const double er = eps * psi[j];
                psi[j] = 1.0 / std::sqrt(1.0 + er * er);
            }
            break;
        case RbfKind::InverseQuadric:
            for (std::size_t j = 0; j < m; ++j) {
                const double er = eps * psi[j];
                psi[j] = 1.0 / (1.0 + er * er);
            }
            break;
    }
    double y0 = A_(0, 0) * x0 + A_(0, 1) * x1 + A_(0, 2) * x2 + o_[0];
    double y1 = A_(1, 0) * x0 + A_(1, 1) * x1 + A_(1, 2) * x2 + o_[1];
    double y2 = A_(2, 0) * x0 + A_(2, 1) * x1 + A_(2, 2) * x2 + o_[2];
    const double* w = W_.data();
    for (std::size_t j = 0; j < m; ++j) {
        y0 += w[3 * j + 0] * psi[j];
        y1 += w[3 * j + 1] * psi[j];
        y2 += w[3 * j + 2] * psi[j];
    }
    return {y0, y1, y2};
}

Color3 eval_warp(const WarpParameters& w, const Color3& x) {
    const WarpKernel kernel(w);
    std::vector<double> scratch(kernel.scratch_size());
    return kernel(x, scratch.data());
}

WarpParameters identity_warp(const ControlGrid& grid, const RadialBasis& rbf, ColorSpace space) {
    WarpParameters w;
    w.grid = grid;
    w.rbf = rbf;
    w.space = space;
    w.W = Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(grid.size()));
    return w;
}

WarpParameters interpolate(std::span<const WarpParameters> warps, std::span<const double> gammas) {
    if (warps.empty()) throw InvalidArgument("interpolate: no warps given");
    if (warps.size() != gammas.size()) throw InvalidArgument("interpolate: one gamma per warp required");
    double total = 0.0;
    for (double g : gammas) {
        if (!std::isfinite(g) || g < 0.0) throw InvalidArgument("interpolate: gammas must be finite and >= 0");
        total += g;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("interpolate: gammas must sum to 1");
    for (const auto& w : warps) {
        if (!w.same_family(warps.front())) {
            throw DataError("interpolate: warps differ in control grid, basis function or colour space");
        }
    }
    Eigen::VectorXd theta = gammas[0] * warps[0].pack();
    for (std::size_t i = 1; i < warps.size(); ++i) theta += gammas[i] * warps[i].pack();
    WarpParameters out = identity_warp(warps[0].grid, warps[0].rbf, warps[0].space);
    out.unpack(std::span<const double>(theta.data(), static_cast<std::size_t>(theta.size())));
    return out;
}

std::string serialise_warp(const WarpParameters& w) {
    std::string out;
    out += std::string(kMagic) + "\n";
    out += "version " + std::to_string(kFormatVersion) + "\n";
    out += "space " + std::string(to_string(w.space)) + "\n";
    out += "grid " + std::to_string(w.grid.per_axis());
    for (int i = 0; i < 3; ++i) out += " " + format_double(w.grid.lower()[i]);
    for (int i = 0; i < 3; ++i) out += " " + format_double(w.grid.upper()[i]);
    out += "\n";
    out += "rbf " + std::string(to_string(w.rbf.kind)) + " " + format_double(w.rbf.epsilon) + "\n";
    const Eigen::VectorXd theta = w.pack();
    out += "theta " + std::to_string(theta.size()) + "\n";
    for (double v : theta) out += format_double(v) + "\n";
    return out;
}

WarpParameters parse_warp(std::string_view text) {
    std::vector<std::string> lines;
    {
        std::string s(text);
        std::istringstream in(s);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
    }
    auto fields = [&](std::size_t idx, std::string_view key) {
        if (idx >= lines.size()) throw DataError("warp file truncated before '" + std::string(key) + "'");
        std::istringstream in(lines[idx]);
        std::vector<std::string> parts;
        std::string p;
        while (in >> p) parts.push_back(p);
        if (parts.empty() || parts[0] != key) {
            throw DataError("warp file line " + std::to_string(idx + 1) + ": expected '" + std::string(key) + "'");
        }
        return parts;
    };

    if (lines.empty() || lines[0] != kMagic) throw DataError("not a warp file: missing '" + std::string(kMagic) + "' header");
    const auto version = fields(1, "version");
    if (version.size() != 2 || version[1] != std::to_string(kFormatVersion)) {
        throw DataError("unsupported warp file version '" + (version.size() > 1 ? version[1] : std::string()) +
                        "' (this build reads version " + std::to_string(kFormatVersion) + ")");
    }
    const auto space = fields(2, "space");
    const auto grid = fields(3, "grid");
    const auto rbf = fields(4, "rbf");
    const auto theta = fields(5, "theta");
    if (space.size() != 2 || grid.size() != 8 || rbf.size() != 3 || theta.size() != 2) {
        throw DataError("warp file header has the wrong number of fields");
    }

    WarpParameters w;
    try {
        w.space = color_space_from_string(space[1]);
        int per_axis = 0;
        const auto res = std::from_chars(grid[1].data(), grid[1].data() + grid[1].size(), per_axis);
        if (res.ec != std::errc() || per_axis < 2) throw DataError("warp file: bad grid size '" + grid[1] + "'");
        Color3 lo, hi;
        for (int i = 0; i < 3; ++i) {
            lo[i] = parse_double(grid[static_cast<std::size_t>(2 + i)], 4);
            hi[i] = parse_double(grid[static_cast<std::size_t>(5 + i)], 4);
        }
        w.grid = ControlGrid(static_cast<std::size_t>(per_axis), lo, hi);
        w.rbf = RadialBasis{rbf_kind_from_string(rbf[1]), parse_double(rbf[2], 5)};
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("warp file header: ") + e.what());
    }
    if (w.rbf.kind != RbfKind::ThinPlate && !(w.rbf.epsilon > 0.0)) throw DataError("warp file: epsilon must be positive");

    const std::size_t count = w.parameter_count();
    if (theta[1] != std::to_string(count)) {
        throw DataError("warp file declares " + theta[1] + " parameters, grid implies " + std::to_string(count));
    }
    std::vector<double> values;
    values.reserve(count);
    for (std::size_t i = 6; i < lines.size(); ++i) {
        if (lines[i].empty() && i + 1 == lines.size()) break;
        values.push_back(parse_double(lines[i], i + 1));
    }
    if (values.size() != count) {
        throw DataError("warp file holds " + std::to_string(values.size()) + " parameters, expected " +
                        std::to_string(count));
    }
    w.unpack(values);
    return w;
}

void save_warp(const WarpParameters& w, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write warp file '" + path.string() + "'");
    out << serialise_warp(w);
    if (!out) throw DataError("failed writing warp file '" + path.string() + "'");
}

WarpParameters load_warp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read warp file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_warp(buf.str());
    } catch (const DataError& e) {
        throw DataError("'" + path.string() + "': " + e.what());
    }
}

}  // namespace l2t
