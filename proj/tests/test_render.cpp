#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shelfsim/collapse.hpp"
#include "shelfsim/errors.hpp"
#include "shelfsim/render.hpp"

using namespace shelfsim;
namespace fs = std::filesystem;

namespace {

Scene two_stack() {
    Scene s;
    for (int i = 0; i < 2; ++i) {
        RigidBox b;
        b.id = "b" + std::to_string(i);
        b.half_extents = {0.1, 0.1, 0.1};
        b.position = {0.5, 0.1 + i * 0.2, 0.15};
        s.boxes.push_back(b);
    }
    return s;
}

std::string dump_bottom_removal(const fs::path& file) {
    SimConfig cfg;
    cfg.rng_seed = 3;
    std::ofstream out(file, std::ios::binary);
    TrajectoryWriter writer(out);
    SceneSample sample;
    sample.scene = two_stack();
    RemovalOutcome outcome =
        simulate_removal(sample, "b0", cfg, CollapseThresholds{}, &writer);
    REQUIRE(outcome.classification == Classification::COLLAPSE);
    out.close();
    std::ifstream in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("trajectory dump renders to numbered SVG frames with collapse highlight") {
    fs::path tmp = fs::temp_directory_path() / "shelfsim_render_test";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    fs::path traj = tmp / "traj.jsonl";
    std::string content = dump_bottom_removal(traj);

    long steps = std::count(content.begin(), content.end(), '\n') - 1;  // minus header
    RenderSpec spec;
    spec.frame_stride = 240;  // one frame per simulated second
    spec.output_dir = (tmp / "frames").string();
    int frames = render_trajectory(traj.string(), spec);
    CHECK(frames == (steps + 239) / 240);
    CHECK(fs::exists(tmp / "frames" / "frame_00000.svg"));

    // the final frame must flag the displaced top box
    char last_name[64];
    std::snprintf(last_name, sizeof(last_name), "frame_%05d.svg", frames - 1);
    std::ifstream last(tmp / "frames" / last_name);
    std::string svg{std::istreambuf_iterator<char>(last), std::istreambuf_iterator<char>()};
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("#d94a4a") != std::string::npos);   // collapsed highlight
    std::ifstream first(tmp / "frames" / "frame_00000.svg");
    std::string svg0{std::istreambuf_iterator<char>(first), std::istreambuf_iterator<char>()};
    CHECK(svg0.find("#d94a4a") == std::string::npos);  // nothing flagged at start

    // top view renders too
    RenderSpec top = spec;
    top.view = RenderView::TOP;
    top.output_dir = (tmp / "frames_top").string();
    CHECK(render_trajectory(traj.string(), top) == frames);
}

TEST_CASE("renderer tolerates truncated trajectories") {
    fs::path tmp = fs::temp_directory_path() / "shelfsim_render_trunc";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    fs::path traj = tmp / "traj.jsonl";
    std::string content = dump_bottom_removal(traj);

    // cut the file in the middle of the last kept line
    std::string cut = content.substr(0, content.size() * 2 / 3);
    std::ofstream out(traj, std::ios::binary);
    out << cut;
    out.close();

    RenderSpec spec;
    spec.frame_stride = 120;
    spec.output_dir = (tmp / "frames").string();
    int frames = render_trajectory(traj.string(), spec);
    CHECK(frames > 0);

    // an empty file is an input error, not a crash
    std::ofstream(tmp / "empty.jsonl").close();
    CHECK_THROWS_AS((void)render_trajectory((tmp / "empty.jsonl").string(), spec),
                    ParseError);
}

TEST_CASE("render spec validation") {
    RenderSpec spec;
    spec.frame_stride = 0;
    CHECK_THROWS_AS(spec.validate(), InvalidInput);
    spec = RenderSpec{};
    spec.highlight_threshold = -1;
    CHECK_THROWS_AS(spec.validate(), InvalidInput);
}
