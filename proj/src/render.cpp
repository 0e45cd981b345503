#include "shelfsim/render.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "shelfsim/errors.hpp"

namespace shelfsim {

namespace {

Json vec3_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct FrameBox {
    BoxId id;
    Vec3 position;
    Quat orientation;
    Vec3 half;
    bool removed = false;
    bool driven = false;
};

struct Frame {
    double t = 0.0;
    std::vector<FrameBox> boxes;
};

}  // namespace

TrajectoryWriter::TrajectoryWriter(std::ostream& out) : out_(out) {}

void TrajectoryWriter::write_header(const World& w) {
    Json j{{"schema_version", kSchemaVersion},
           {"shelf",
            Json{{"width", w.shelf().width},
                 {"height", w.shelf().height},
                 {"depth", w.shelf().depth}}},
           {"timestep", w.config().timestep}};
    out_ << j.dump() << "\n";
    header_written_ = true;
}

void TrajectoryWriter::on_step(const World& w) {
    if (!header_written_) write_header(w);
    Json boxes = Json::array();
    for (std::size_t i = 0; i < w.box_count(); ++i) {
        const Body& b = w.body(i);
        boxes.push_back(Json{
            {"id", b.id},
            {"position", vec3_json(b.position)},
            {"orientation", Json::array({b.orientation.w, b.orientation.x, b.orientation.y,
                                         b.orientation.z})},
            {"half_extents", vec3_json(b.half)},
            {"linear_velocity", vec3_json(b.linear_velocity)},
            {"angular_velocity", vec3_json(b.angular_velocity)},
            {"removed", b.removed},
            {"driven", b.driven}});
    }
    out_ << Json{{"t", w.elapsed()}, {"boxes", boxes}}.dump() << "\n";
}

RenderView render_view_from_string(const std::string& s) {
    if (s == "front") return RenderView::FRONT;
    if (s == "top") return RenderView::TOP;
    throw ParseError("unknown view: " + s);
}

void RenderSpec::validate() const {
    if (frame_stride < 1) throw InvalidInput("frame_stride must be at least 1");
    if (highlight_threshold <= 0) throw InvalidInput("highlight_threshold must be positive");
    if (image_width < 64) throw InvalidInput("image_width must be at least 64 px");
}

namespace {

Vec2 project(const RenderSpec& spec, const Vec3& p) {
    return spec.view == RenderView::FRONT ? Vec2{p.x, p.y} : Vec2{p.x, p.z};
}

std::string render_frame(const Frame& frame, const Shelf& shelf, const RenderSpec& spec,
                         const std::map<BoxId, Vec3>& baseline) {
    const double margin = 20.0;
    const double world_w = shelf.width;
    const double world_h = spec.view == RenderView::FRONT ? shelf.height : shelf.depth;
    const double scale = (spec.image_width - 2 * margin) / world_w;
    const double image_h = world_h * scale + 2 * margin;

    auto to_px = [&](const Vec2& p) {
        // y-up world to y-down image; top view puts the shelf front at the bottom
        return Vec2{margin + p.x * scale, image_h - margin - p.y * scale};
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.image_width
        << "\" height=\"" << fmt(image_h) << "\" viewBox=\"0 0 " << spec.image_width << " "
        << fmt(image_h) << "\">\n";
    svg << "  <rect width=\"100%\" height=\"100%\" fill=\"#f7f3ec\"/>\n";

    Vec2 s0 = to_px({0, 0}), s1 = to_px({world_w, world_h});
    svg << "  <rect x=\"" << fmt(s0.x) << "\" y=\"" << fmt(s1.y) << "\" width=\""
        << fmt(s1.x - s0.x) << "\" height=\"" << fmt(s0.y - s1.y)
        << "\" fill=\"none\" stroke=\"#6b6257\" stroke-width=\"2\"/>\n";

    for (const FrameBox& b : frame.boxes) {
        if (b.removed) continue;
        std::vector<Vec2> pts;
        for (const Vec3& corner : box_corners(b.position, b.orientation, b.half))
            pts.push_back(project(spec, corner));
        Polygon2 hull = convex_hull(pts);
        if (hull.size() < 3) continue;

        const char* fill = "#d9c7a0";
        if (b.driven) {
            fill = "#4a90d9";
        } else {
            auto it = baseline.find(b.id);
            if (it != baseline.end() &&
                length(b.position - it->second) > spec.highlight_threshold)
                fill = "#d94a4a";
        }

        svg << "  <polygon points=\"";
        for (std::size_t i = 0; i < hull.size(); ++i) {
            Vec2 px = to_px(hull[i]);
            if (i) svg << " ";
            svg << fmt(px.x) << "," << fmt(px.y);
        }
        svg << "\" fill=\"" << fill << "\" stroke=\"#5b4a36\" stroke-width=\"1\"/>\n";

        Vec2 label = to_px(project(spec, b.position));
        svg << "  <text x=\"" << fmt(label.x) << "\" y=\"" << fmt(label.y)
            << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333\">" << b.id
            << "</text>\n";
    }

    svg << "  <text x=\"" << fmt(margin) << "\" y=\"" << fmt(margin - 6)
        << "\" font-size=\"12\" fill=\"#333\">t=" << fmt(frame.t) << "s</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace

int render_trajectory(const std::string& trajectory_path, const RenderSpec& spec) {
    spec.validate();
    std::istringstream lines(read_text_file(trajectory_path));

    std::string line;
    if (!std::getline(lines, line)) throw ParseError("empty trajectory file");
    Shelf shelf;
    try {
        Json header = Json::parse(line);
        shelf.width = header.at("shelf").at("width").get<double>();
        shelf.height = header.at("shelf").at("height").get<double>();
        shelf.depth = header.at("shelf").at("depth").get<double>();
    } catch (const Json::exception& e) {
        throw ParseError(std::string("trajectory header: ") + e.what());
    }

    std::filesystem::create_directories(spec.output_dir);

    std::map<BoxId, Vec3> baseline;
    int step = 0, frames = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        Frame frame;
        try {
            Json j = Json::parse(line);
            frame.t = j.at("t").get<double>();
            for (const Json& jb : j.at("boxes")) {
                FrameBox b;
                b.id = jb.at("id").get<std::string>();
                const Json& p = jb.at("position");
                b.position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
                const Json& q = jb.at("orientation");
                b.orientation = {q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                                 q[3].get<double>()};
                const Json& h = jb.at("half_extents");
                b.half = {h[0].get<double>(), h[1].get<double>(), h[2].get<double>()};
                b.removed = jb.value("removed", false);
                b.driven = jb.value("driven", false);
                frame.boxes.push_back(std::move(b));
            }
        } catch (const Json::exception&) {
            break;  // truncated dump: render what we have
        }

        if (baseline.empty())
            for (const FrameBox& b : frame.boxes) baseline[b.id] = b.position;

        if (step % spec.frame_stride == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "frame_%05d.svg", frames);
            write_text_file((std::filesystem::path(spec.output_dir) / name).string(),
                            render_frame(frame, shelf, spec, baseline));
            ++frames;
        }
        ++step;
    }
    return frames;
}

}  // namespace shelfsim
