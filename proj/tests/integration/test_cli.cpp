// Drives the l2transfer binary end to end through the shell.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "l2t/image_io.hpp"
#include "l2t/recolor.hpp"
#include "l2t/warp.hpp"
#include "scenes.hpp"

using namespace l2t;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(L2T_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (const std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), got);
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

fs::path workdir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "l2t_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

double mean_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a.pixels()[i] - b.pixels()[i]).cwiseAbs().sum();
    return s / static_cast<double>(3 * a.size());
}

// 8-bit values as they would be written to disk.
std::vector<long> bytes(const ImageBuffer& img) {
    std::vector<long> out;
    out.reserve(3 * img.size());
    for (const auto& p : img.pixels())
        for (int c = 0; c < 3; ++c) out.push_back(std::lround(std::clamp(p[c], 0.0, 1.0) * 255.0));
    return out;
}

WarpParameters some_warp(double shift) {
    WarpParameters w = identity_warp(ControlGrid(), {});
    w.A(0, 1) = 0.1;
    w.o = Color3(shift, -0.5 * shift, 0.02);
    w.W.col(62) = Color3(0.05, 0.0, -0.04);
    return w;
}

}  // namespace

TEST_CASE("self-transfer estimate barely changes the image") {
    const auto dir = workdir("self");
    save_image(testing::make_scene(96, 64, 1), dir / "t.png");
    const auto res = run("estimate " + q(dir / "t.png") + " " + q(dir / "t.png") + " -o " + q(dir / "w.warp") +
                         " --seed 3 --log " + q(dir / "log.txt"));
    REQUIRE_MESSAGE(res.status == 0, res.output);
    CHECK(res.output.find("mode=kmeans space=rgb rbf=tps lambda=3e-06") != std::string::npos);
    CHECK(fs::file_size(dir / "log.txt") > 0);
    const auto app = run("apply " + q(dir / "w.warp") + " " + q(dir / "t.png") + " -o " + q(dir / "out.png"));
    REQUIRE_MESSAGE(app.status == 0, app.output);
    CHECK(mean_abs_diff(load_image(dir / "out.png"), load_image(dir / "t.png")) < 2.0 / 255.0);
}

TEST_CASE("correspondence mode resolves tuned defaults and checks sizes") {
    const auto dir = workdir("corr");
    const ImageBuffer t = testing::quantise8(testing::make_scene(64, 48, 2));
    save_image(t, dir / "t.png");
    save_image(testing::apply_reference_shift(t), dir / "p.png");
    save_image(testing::make_scene(60, 48, 2), dir / "other.png");

    const auto ok = run("estimate " + q(dir / "t.png") + " " + q(dir / "p.png") + " -o " + q(dir / "w.warp") +
                        " --mode corr --n 2000");
    REQUIRE_MESSAGE(ok.status == 0, ok.output);
    CHECK(ok.output.find("mode=corr space=rgb rbf=tps lambda=0.003") != std::string::npos);

    const auto bad = run("estimate " + q(dir / "t.png") + " " + q(dir / "other.png") + " -o " + q(dir / "x.warp") +
                         " --mode corr --n 100");
    CHECK(bad.status == 2);
    CHECK(bad.output.find("equal size") != std::string::npos);
    CHECK(!fs::exists(dir / "x.warp"));

    const auto usage = run("estimate " + q(dir / "t.png") + " --mode nope");
    CHECK(usage.status == 1);
}

TEST_CASE("apply: identity, directories and corrupted warps") {
    const auto dir = workdir("apply");
    save_warp(identity_warp(ControlGrid(), {}), dir / "id.warp");
    fs::create_directories(dir / "frames");
    for (int i = 0; i < 3; ++i)
        save_image(testing::make_scene(40, 30, 10 + static_cast<std::uint64_t>(i)),
                   dir / "frames" / ("f" + std::to_string(i) + ".png"));

    const auto one = run("apply " + q(dir / "id.warp") + " " + q(dir / "frames" / "f0.png") + " -o " + q(dir / "o.png"));
    REQUIRE_MESSAGE(one.status == 0, one.output);
    CHECK(load_image(dir / "o.png").pixels() == load_image(dir / "frames" / "f0.png").pixels());

    const auto many = run("apply " + q(dir / "id.warp") + " " + q(dir / "frames") + " -o " + q(dir / "out"));
    REQUIRE_MESSAGE(many.status == 0, many.output);
    const auto outs = list_image_files(dir / "out");
    REQUIRE(outs.size() == 3);
    for (int i = 0; i < 3; ++i) {
        const std::string name = "f" + std::to_string(i) + ".png";
        CHECK(outs[static_cast<std::size_t>(i)].filename() == name);
        CHECK(load_image(dir / "out" / name).pixels() == load_image(dir / "frames" / name).pixels());
    }

    std::string text = slurp(dir / "id.warp");
    text.resize(text.size() / 2);
    std::ofstream(dir / "broken.warp") << text;
    const auto broken =
        run("apply " + q(dir / "broken.warp") + " " + q(dir / "frames" / "f0.png") + " -o " + q(dir / "b.png"));
    CHECK(broken.status == 2);

    const auto mismatch = run("apply " + q(dir / "id.warp") + " " + q(dir / "frames" / "f0.png") + " -o " +
                              q(dir / "m.png") + " --space lab");
    CHECK(mismatch.status != 0);
}

TEST_CASE("mix agrees with apply and with dissolves") {
    const auto dir = workdir("mix");
    const WarpParameters w1 = some_warp(0.08);
    const WarpParameters w2 = some_warp(-0.06);
    save_warp(w1, dir / "w1.warp");
    save_warp(w2, dir / "w2.warp");
    const ImageBuffer img = testing::quantise8(testing::make_scene(48, 32, 4));
    save_image(img, dir / "in.png");
    save_image(ImageBuffer(48, 32, ColorSpace::RGB, Color3(1, 1, 1)), dir / "white.png");

    REQUIRE(run("apply " + q(dir / "w1.warp") + " " + q(dir / "in.png") + " -o " + q(dir / "a1.png")).status == 0);
    REQUIRE(run("mix " + q(dir / "w1.warp") + " " + q(dir / "w2.warp") + " " + q(dir / "in.png") + " -o " +
                q(dir / "g1.png") + " --gamma 1")
                .status == 0);
    REQUIRE(run("mix " + q(dir / "w1.warp") + " " + q(dir / "w2.warp") + " " + q(dir / "in.png") + " -o " +
                q(dir / "m1.png") + " --mask " + q(dir / "white.png"))
                .status == 0);
    const ImageBuffer a1 = load_image(dir / "a1.png");
    CHECK(load_image(dir / "g1.png").pixels() == a1.pixels());
    CHECK(load_image(dir / "m1.png").pixels() == a1.pixels());

    fs::create_directories(dir / "frames");
    std::vector<ImageBuffer> frames;
    for (int i = 0; i < 3; ++i) {
        frames.push_back(testing::quantise8(testing::make_scene(48, 32, 20 + static_cast<std::uint64_t>(i))));
        save_image(frames.back(), dir / "frames" / ("f" + std::to_string(i) + ".png"));
    }
    std::ofstream(dir / "schedule.txt") << "# gamma per frame\n1\n0.5\n0\n";
    const auto sched = run("mix " + q(dir / "w1.warp") + " " + q(dir / "w2.warp") + " " + q(dir / "frames") + " -o " +
                           q(dir / "dissolve") + " --schedule " + q(dir / "schedule.txt"));
    REQUIRE_MESSAGE(sched.status == 0, sched.output);
    const std::vector<double> gammas = {1.0, 0.5, 0.0};
    const auto expected = apply_dissolve(w1, w2, gammas, frames, 1);
    for (int i = 0; i < 3; ++i) {
        const auto got = load_image(dir / "dissolve" / ("f" + std::to_string(i) + ".png"));
        CHECK(bytes(got) == bytes(expected[static_cast<std::size_t>(i)]));
    }

    const auto neither =
        run("mix " + q(dir / "w1.warp") + " " + q(dir / "w2.warp") + " " + q(dir / "in.png") + " -o " + q(dir / "x.png"));
    CHECK(neither.status == 1);
    save_warp(identity_warp(ControlGrid(), {RbfKind::Gaussian, 1.0}), dir / "g.warp");
    const auto family = run("mix " + q(dir / "w1.warp") + " " + q(dir / "g.warp") + " " + q(dir / "in.png") + " -o " +
                            q(dir / "x.png") + " --gamma 0.5");
    CHECK(family.status == 2);
}

TEST_CASE("metrics report and CSV rows") {
    const auto dir = workdir("metrics");
    ImageBuffer a(32, 32, ColorSpace::RGB, Color3(100 / 255.0, 50 / 255.0, 200 / 255.0));
    ImageBuffer b(32, 32, ColorSpace::RGB, Color3(101 / 255.0, 51 / 255.0, 201 / 255.0));
    save_image(a, dir / "a.png");
    save_image(b, dir / "b.png");
    const auto same = run("metrics " + q(dir / "a.png") + " " + q(dir / "a.png") + " --csv " + q(dir / "m.csv"));
    REQUIRE_MESSAGE(same.status == 0, same.output);
    CHECK(same.output.find("psnr=100.0000 ssim=1.000000") != std::string::npos);
    const auto off = run("metrics " + q(dir / "b.png") + " " + q(dir / "a.png") + " --csv " + q(dir / "m.csv"));
    CHECK(off.output.find("psnr=48.13") != std::string::npos);
    const std::string csv = slurp(dir / "m.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

    save_image(ImageBuffer(31, 32, ColorSpace::RGB), dir / "c.png");
    CHECK(run("metrics " + q(dir / "c.png") + " " + q(dir / "a.png")).status == 2);
}

TEST_CASE("pipeline runs are reproducible and match estimate then apply") {
    const auto dir = workdir("pipeline");
    const ImageBuffer t = testing::quantise8(testing::make_scene(80, 60, 5));
    save_image(t, dir / "t.png");
    save_image(testing::apply_reference_shift(t), dir / "p.png");
    const std::string common = " --k 20 --seed 9 --rbf gaussian --space lab";
    for (const char* tag : {"1", "2"}) {
        const auto r = run("pipeline " + q(dir / "t.png") + " " + q(dir / "p.png") + " -o " +
                           q(dir / (std::string("out") + tag + ".png")) + " --warp-out " +
                           q(dir / (std::string("w") + tag + ".warp")) + common);
        REQUIRE_MESSAGE(r.status == 0, r.output);
    }
    CHECK(slurp(dir / "w1.warp") == slurp(dir / "w2.warp"));
    CHECK(slurp(dir / "out1.png") == slurp(dir / "out2.png"));

    REQUIRE(run("apply " + q(dir / "w1.warp") + " " + q(dir / "t.png") + " -o " + q(dir / "reapplied.png")).status == 0);
    CHECK(load_image(dir / "reapplied.png").pixels() == load_image(dir / "out1.png").pixels());
    CHECK(load_warp(dir / "w1.warp").space == ColorSpace::Lab);
}
