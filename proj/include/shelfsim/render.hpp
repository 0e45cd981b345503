#ifndef SHELFSIM_RENDER_HPP
#define SHELFSIM_RENDER_HPP

#include <ostream>
#include <string>

#include "shelfsim/json_io.hpp"
#include "shelfsim/physics.hpp"

namespace shelfsim {

// JSON-lines trajectory dump: one header object, then one object per step
// with pose and velocity for every box. Consumed by the SVG renderer.
class TrajectoryWriter : public StepSink {
public:
    explicit TrajectoryWriter(std::ostream& out);
    void write_header(const World& w);
    void on_step(const World& w) override;

private:
    std::ostream& out_;
    bool header_written_ = false;
};

enum class RenderView { FRONT, TOP };

RenderView render_view_from_string(const std::string& s);

struct RenderSpec {
    RenderView view = RenderView::FRONT;
    int frame_stride = 8;              // steps per frame
    double highlight_threshold = 0.02; // displacement that flags a box, m
    std::string output_dir = ".";
    int image_width = 640;             // px

    void validate() const;  // throws InvalidInput
};

// Renders numbered SVG frames (frame_00000.svg, ...) from a trajectory dump.
// Truncated or trailing-garbage trajectories render whatever is available.
// Returns the number of frames written.
int render_trajectory(const std::string& trajectory_path, const RenderSpec& spec);

}  // namespace shelfsim

#endif
