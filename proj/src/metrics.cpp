#include "mpntrack/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace mpntrack {

std::vector<int> min_cost_assignment(std::vector<double> const & cost, int n, int m) {
    if (cost.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m))
        throw std::invalid_argument("min_cost_assignment: matrix size mismatch");
    int const dim = std::max(n, m);
    double const inf = std::numeric_limits<double>::infinity();
    auto at = [&](int r, int c) -> double {
        if (r >= n || c >= m) return 0.0;  // dummy padding
        return cost[static_cast<std::size_t>(r) * m + c];
    };

    // Potentials-based Hungarian on the padded square matrix; 1-based
    // internal indexing, column 0 is the scratch column.
    std::vector<double> u(static_cast<std::size_t>(dim) + 1, 0.0), v(static_cast<std::size_t>(dim) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(dim) + 1, 0), way(static_cast<std::size_t>(dim) + 1, 0);
    for (int i = 1; i <= dim; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(dim) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(dim) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            int const i0 = p[static_cast<std::size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= dim; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                double const cur = at(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= dim; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            int const j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= dim; ++j) {
        int const i = p[static_cast<std::size_t>(j)];
        if (i >= 1 && i <= n && j <= m) row_to_col[static_cast<std::size_t>(i - 1)] = j - 1;
    }
    return row_to_col;
}

std::vector<int> match_frame(std::vector<Box> const & gt_boxes, std::vector<Box> const & pred_boxes,
                             double iou_min, std::vector<int> const & carry_over) {
    int const n = static_cast<int>(gt_boxes.size());
    int const m = static_cast<int>(pred_boxes.size());
    std::vector<int> match(static_cast<std::size_t>(n), -1);
    std::vector<char> pred_taken(static_cast<std::size_t>(m), 0);

    // CLEAR carry-over: keep last frame's pairing whenever it still overlaps.
    if (!carry_over.empty()) {
        for (int g = 0; g < n; ++g) {
            int const p = carry_over[static_cast<std::size_t>(g)];
            if (p < 0 || p >= m || pred_taken[static_cast<std::size_t>(p)]) continue;
            if (iou(gt_boxes[static_cast<std::size_t>(g)], pred_boxes[static_cast<std::size_t>(p)]) >= iou_min) {
                match[static_cast<std::size_t>(g)] = p;
                pred_taken[static_cast<std::size_t>(p)] = 1;
            }
        }
    }

    std::vector<int> free_gt, free_pred;
    for (int g = 0; g < n; ++g)
        if (match[static_cast<std::size_t>(g)] == -1) free_gt.push_back(g);
    for (int p = 0; p < m; ++p)
        if (!pred_taken[static_cast<std::size_t>(p)]) free_pred.push_back(p);
    if (free_gt.empty() || free_pred.empty()) return match;

    // Cardinality dominates: every valid pair gets a bonus larger than any
    // achievable total IoU difference.
    double const bonus = static_cast<double>(free_gt.size() + free_pred.size()) + 1.0;
    std::vector<double> cost(free_gt.size() * free_pred.size(), 0.0);
    for (std::size_t a = 0; a < free_gt.size(); ++a)
        for (std::size_t b = 0; b < free_pred.size(); ++b) {
            double const overlap = iou(gt_boxes[static_cast<std::size_t>(free_gt[a])],
                                       pred_boxes[static_cast<std::size_t>(free_pred[b])]);
            cost[a * free_pred.size() + b] = overlap >= iou_min ? -(bonus + overlap) : 0.0;
        }
    auto const assignment =
        min_cost_assignment(cost, static_cast<int>(free_gt.size()), static_cast<int>(free_pred.size()));
    for (std::size_t a = 0; a < free_gt.size(); ++a) {
        int const b = assignment[a];
        if (b < 0) continue;
        if (cost[a * free_pred.size() + static_cast<std::size_t>(b)] >= 0.0) continue;  // dummy/invalid
        match[static_cast<std::size_t>(free_gt[a])] = free_pred[static_cast<std::size_t>(b)];
    }
    return match;
}

namespace {

struct FrameEntry {
    int track_idx;
    Box box;
};

// frame -> entries, with track order preserved per frame.
std::map<int, std::vector<FrameEntry>> by_frame(std::vector<Trajectory> const & tracks) {
    std::map<int, std::vector<FrameEntry>> out;
    for (std::size_t t = 0; t < tracks.size(); ++t)
        for (auto const & det : tracks[t].detections)
            out[det.frame].push_back(FrameEntry{static_cast<int>(t), det.box});
    return out;
}

std::int64_t count_boxes(std::vector<Trajectory> const & tracks) {
    std::int64_t n = 0;
    for (auto const & t : tracks) n += static_cast<std::int64_t>(t.detections.size());
    return n;
}

struct FrameMatchSweep {
    std::int64_t fp = 0, fn = 0, idsw = 0;
    // matched frame count per gt track index
    std::vector<std::int64_t> gt_matched;
};

FrameMatchSweep sweep_frames(std::vector<Trajectory> const & gt, std::vector<Trajectory> const & pred,
                             double iou_min) {
    auto const gt_frames = by_frame(gt);
    auto const pred_frames = by_frame(pred);

    FrameMatchSweep sweep;
    sweep.gt_matched.assign(gt.size(), 0);
    std::vector<int> last_pred(gt.size(), -1);  // pred track idx of the most recent match

    std::map<int, int> all_frames;
    for (auto const & [f, v] : gt_frames) all_frames[f] = 0;
    for (auto const & [f, v] : pred_frames) all_frames[f] = 0;

    for (auto const & [frame, unused] : all_frames) {
        auto const git = gt_frames.find(frame);
        auto const pit = pred_frames.find(frame);
        std::size_t const ng = git == gt_frames.end() ? 0 : git->second.size();
        std::size_t const np = pit == pred_frames.end() ? 0 : pit->second.size();
        if (ng == 0) {
            sweep.fp += static_cast<std::int64_t>(np);
            continue;
        }
        if (np == 0) {
            sweep.fn += static_cast<std::int64_t>(ng);
            continue;
        }

        std::vector<Box> gt_boxes(ng), pred_boxes(np);
        std::vector<int> carry(ng, -1);
        for (std::size_t a = 0; a < ng; ++a) {
            gt_boxes[a] = git->second[a].box;
            int const lp = last_pred[static_cast<std::size_t>(git->second[a].track_idx)];
            if (lp == -1) continue;
            for (std::size_t b = 0; b < np; ++b)
                if (pit->second[b].track_idx == lp) carry[a] = static_cast<int>(b);
        }
        for (std::size_t b = 0; b < np; ++b) pred_boxes[b] = pit->second[b].box;

        auto const match = match_frame(gt_boxes, pred_boxes, iou_min, carry);
        std::int64_t matched = 0;
        for (std::size_t a = 0; a < ng; ++a) {
            if (match[a] == -1) continue;
            ++matched;
            int const g_track = git->second[a].track_idx;
            int const p_track = pit->second[static_cast<std::size_t>(match[a])].track_idx;
            if (last_pred[static_cast<std::size_t>(g_track)] != -1 &&
                last_pred[static_cast<std::size_t>(g_track)] != p_track)
                ++sweep.idsw;
            last_pred[static_cast<std::size_t>(g_track)] = p_track;
            ++sweep.gt_matched[static_cast<std::size_t>(g_track)];
        }
        sweep.fn += static_cast<std::int64_t>(ng) - matched;
        sweep.fp += static_cast<std::int64_t>(np) - matched;
    }
    return sweep;
}

}  // namespace

MotaComponents mota(std::vector<Trajectory> const & gt, std::vector<Trajectory> const & pred,
                    double iou_min) {
    MotaComponents out;
    out.gt_boxes = count_boxes(gt);
    if (out.gt_boxes == 0) throw std::invalid_argument("mota: no ground-truth boxes");
    auto const sweep = sweep_frames(gt, pred, iou_min);
    out.fp = sweep.fp;
    out.fn = sweep.fn;
    out.idsw = sweep.idsw;
    out.mota = 1.0 - static_cast<double>(out.fp + out.fn + out.idsw) / static_cast<double>(out.gt_boxes);
    return out;
}

double idf1(std::vector<Trajectory> const & gt, std::vector<Trajectory> const & pred, double iou_min,
            std::int64_t * idtp_out) {
    std::int64_t const n_gt = count_boxes(gt);
    std::int64_t const n_pred = count_boxes(pred);
    if (idtp_out) *idtp_out = 0;
    if (n_gt + n_pred == 0) return 0.0;
    if (gt.empty() || pred.empty()) return 0.0;

    // Overlap count per (gt track, pred track): frames where both are
    // present and the boxes meet the IoU threshold.
    std::vector<double> overlap(gt.size() * pred.size(), 0.0);
    for (std::size_t g = 0; g < gt.size(); ++g) {
        std::map<int, Box> gmap;
        for (auto const & det : gt[g].detections) gmap[det.frame] = det.box;
        for (std::size_t p = 0; p < pred.size(); ++p) {
            double count = 0.0;
            for (auto const & det : pred[p].detections) {
                auto it = gmap.find(det.frame);
                if (it != gmap.end() && iou(it->second, det.box) >= iou_min) count += 1.0;
            }
            overlap[g * pred.size() + p] = count;
        }
    }

    std::vector<double> cost(overlap.size());
    for (std::size_t i = 0; i < overlap.size(); ++i) cost[i] = -overlap[i];
    auto const assignment =
        min_cost_assignment(cost, static_cast<int>(gt.size()), static_cast<int>(pred.size()));
    std::int64_t idtp = 0;
    for (std::size_t g = 0; g < gt.size(); ++g)
        if (assignment[g] >= 0)
            idtp += static_cast<std::int64_t>(overlap[g * pred.size() + static_cast<std::size_t>(assignment[g])]);
    if (idtp_out) *idtp_out = idtp;
    return 2.0 * static_cast<double>(idtp) / static_cast<double>(n_gt + n_pred);
}

std::pair<int, int> mt_ml(std::vector<Trajectory> const & gt, std::vector<Trajectory> const & pred,
                          double iou_min) {
    auto const sweep = sweep_frames(gt, pred, iou_min);
    int mt = 0, ml = 0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
        if (gt[g].detections.empty()) continue;
        double const coverage = static_cast<double>(sweep.gt_matched[g]) /
                                static_cast<double>(gt[g].detections.size());
        if (coverage >= 0.8) ++mt;
        else if (coverage <= 0.2) ++ml;
    }
    return {mt, ml};
}

EvalResult evaluate(std::vector<Trajectory> const & gt, std::vector<Trajectory> const & pred,
                    double iou_min) {
    EvalResult r;
    auto const m = mota(gt, pred, iou_min);
    r.fp = m.fp;
    r.fn = m.fn;
    r.idsw = m.idsw;
    r.gt_boxes = m.gt_boxes;
    r.pred_boxes = count_boxes(pred);
    r.mota = m.mota;
    r.idf1 = idf1(gt, pred, iou_min, &r.idtp);
    auto const [mt, ml] = mt_ml(gt, pred, iou_min);
    r.mt = mt;
    r.ml = ml;
    return r;
}

}  // namespace mpntrack
