#pragma once

#include <cstdint>
#include <vector>

#include "mpntrack/types.hpp"

namespace mpntrack {

// Minimum-cost assignment on an n x m cost matrix (row-major), returning
// per-row assigned column or -1. Rows/columns beyond the square part are
// padded internally with zero-cost dummies, so leaving a row unassigned
// costs nothing.
std::vector<int> min_cost_assignment(std::vector<double> const & cost, int n, int m);

// One-to-one gt/pred matching for a single frame: maximum cardinality
// first, then maximum total IoU, over pairs with IoU >= iou_min.
// carry_over holds the pred index each gt was matched to previously (or
// -1); those pairs are retained before assigning the remainder.
std::vector<int> match_frame(std::vector<Box> const & gt_boxes, std::vector<Box> const & pred_boxes,
                             double iou_min = 0.5, std::vector<int> const & carry_over = {});

struct EvalResult {
    double mota = 0.0;
    double idf1 = 0.0;
    int mt = 0;
    int ml = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t idsw = 0;
    std::int64_t gt_boxes = 0;
    std::int64_t pred_boxes = 0;
    std::int64_t idtp = 0;
};

struct MotaComponents {
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t idsw = 0;
    std::int64_t gt_boxes = 0;
    double mota = 0.0;
};

MotaComponents mota(std::vector<Trajectory> const & gt, std::vector<Trajectory> const & pred,
                    double iou_min = 0.5);

double idf1(std::vector<Trajectory> const & gt, std::vector<Trajectory> const & pred,
            double iou_min = 0.5, std::int64_t * idtp_out = nullptr);

// Mostly Tracked (matched in >= 80% of its frames) and Mostly Lost
// (<= 20%) ground-truth track counts.
std::pair<int, int> mt_ml(std::vector<Trajectory> const & gt, std::vector<Trajectory> const & pred,
                          double iou_min = 0.5);

EvalResult evaluate(std::vector<Trajectory> const & gt, std::vector<Trajectory> const & pred,
                    double iou_min = 0.5);

}  // namespace mpntrack
