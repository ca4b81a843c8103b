#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

namespace mpntrack {

// Axis-aligned box, top-left corner convention, pixel units.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
};

inline double iou(Box const & a, Box const & b) {
    double const x1 = std::max(a.x, b.x);
    double const y1 = std::max(a.y, b.y);
    double const x2 = std::min(a.x + a.w, b.x + b.w);
    double const y2 = std::min(a.y + a.h, b.y + b.h);
    double const iw = x2 - x1;
    double const ih = y2 - y1;
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    double const inter = iw * ih;
    double const uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

// One observed object in one frame. `appearance` stands in for the
// embedding a ReID backbone would produce; it is supplied by an
// AppearanceProvider or baked in by the synthetic generator.
struct Detection {
    int id = 0;                      // unique within a sequence
    int frame = 0;                   // 0-based internally
    Box box;
    double confidence = 1.0;
    std::vector<double> appearance;
    std::optional<int> gt_track;     // nullopt = false positive / unknown

    // Original frame in the source sequence. Clip sampling and fps
    // subsampling remap `frame` to consecutive step indices; this keeps
    // the file-level timestamp for output and evaluation.
    int source_frame = 0;
};

// Time-ordered detections sharing one identity.
struct Trajectory {
    int id = 0;
    std::vector<Detection> detections;  // sorted by frame
};

}  // namespace mpntrack
