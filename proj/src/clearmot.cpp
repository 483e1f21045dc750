#include "ngt/clearmot.hpp"

#include "ngt/assignment.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>

namespace ngt {

double iou(const BoundingBox& a, const BoundingBox& b) {
    const double x1 = std::max(a.left, b.left);
    const double y1 = std::max(a.top, b.top);
    const double x2 = std::min(a.left + a.width, b.left + b.width);
    const double y2 = std::min(a.top + a.height, b.top + b.height);
    const double inter = std::max(0.0, x2 - x1) * std::max(0.0, y2 - y1);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

namespace {

using FrameMap = std::map<int, std::vector<const LabeledBox*>>;

FrameMap group_by_frame(std::span<const LabeledBox> boxes, const char* what) {
    FrameMap frames;
    for (const auto& b : boxes) {
        if (b.frame < 1) {
            throw InvalidInput(std::string(what) + ": frame numbers start at 1");
        }
        if (b.id < 1) {
            throw InvalidInput(std::string(what) + ": ids must be positive");
        }
        if (!b.box.valid()) {
            throw InvalidInput(std::string(what) + ": invalid box at frame " + std::to_string(b.frame));
        }
        frames[b.frame].push_back(&b);
    }
    for (const auto& [frame, list] : frames) {
        std::set<int> ids;
        for (const auto* b : list) {
            if (!ids.insert(b->id).second) {
                throw InvalidInput(std::string(what) + ": id " + std::to_string(b->id) + " repeated in frame " +
                                   std::to_string(frame));
            }
        }
    }
    return frames;
}

}  // namespace

EvalReport evaluate(std::span<const LabeledBox> ground_truth, std::span<const LabeledBox> hypotheses,
                    double iou_threshold) {
    const FrameMap gt_frames = group_by_frame(ground_truth, "ground truth");
    const FrameMap hyp_frames = group_by_frame(hypotheses, "hypotheses");
    std::set<int> all_frames;
    for (const auto& [f, _] : gt_frames) {
        all_frames.insert(f);
    }
    for (const auto& [f, _] : hyp_frames) {
        all_frames.insert(f);
    }

    EvalReport report;
    report.gt_boxes = static_cast<int>(ground_truth.size());
    report.hyp_boxes = static_cast<int>(hypotheses.size());

    std::map<int, int> last_match;             // gt id -> hypothesis id of its latest correspondence
    std::map<int, int> gt_frames_present;      // gt id -> frames present
    std::map<int, int> gt_frames_tracked;      // gt id -> frames matched
    std::map<std::pair<int, int>, int> overlap;  // (gt id, hyp id) -> frames with IoU >= threshold
    std::set<int> hyp_ids;

    const std::vector<const LabeledBox*> none;
    for (int frame : all_frames) {
        auto git = gt_frames.find(frame);
        auto hit = hyp_frames.find(frame);
        const auto& gts = git == gt_frames.end() ? none : git->second;
        const auto& hyps = hit == hyp_frames.end() ? none : hit->second;

        FrameCounts counts;
        counts.frame = frame;
        counts.gt = static_cast<int>(gts.size());
        counts.hypotheses = static_cast<int>(hyps.size());

        AffinityMatrix overlaps(gts.size(), hyps.size());
        for (std::size_t i = 0; i < gts.size(); ++i) {
            ++gt_frames_present[gts[i]->id];
            for (std::size_t j = 0; j < hyps.size(); ++j) {
                const double v = iou(gts[i]->box, hyps[j]->box);
                if (v >= iou_threshold) {
                    overlaps.set(i, j, v);
                    ++overlap[{gts[i]->id, hyps[j]->id}];
                }
            }
        }
        for (const auto* h : hyps) {
            hyp_ids.insert(h->id);
        }

        // Keep previous correspondences that are still valid.
        std::vector<char> gt_used(gts.size(), 0), hyp_used(hyps.size(), 0);
        std::vector<std::pair<std::size_t, std::size_t>> frame_matches;
        for (std::size_t i = 0; i < gts.size(); ++i) {
            auto prev = last_match.find(gts[i]->id);
            if (prev == last_match.end()) {
                continue;
            }
            for (std::size_t j = 0; j < hyps.size(); ++j) {
                if (!hyp_used[j] && hyps[j]->id == prev->second && !overlaps.forbidden(i, j)) {
                    gt_used[i] = hyp_used[j] = 1;
                    frame_matches.emplace_back(i, j);
                    break;
                }
            }
        }

        // Remaining pairs by maximum total IoU.
        std::vector<std::size_t> free_gt, free_hyp;
        for (std::size_t i = 0; i < gts.size(); ++i) {
            if (!gt_used[i]) {
                free_gt.push_back(i);
            }
        }
        for (std::size_t j = 0; j < hyps.size(); ++j) {
            if (!hyp_used[j]) {
                free_hyp.push_back(j);
            }
        }
        AffinityMatrix rest(free_gt.size(), free_hyp.size());
        for (std::size_t a = 0; a < free_gt.size(); ++a) {
            for (std::size_t b = 0; b < free_hyp.size(); ++b) {
                rest.set(a, b, overlaps.at(free_gt[a], free_hyp[b]));
            }
        }
        for (const auto& m : solve_assignment(rest)) {
            const std::size_t i = free_gt[m.row];
            const std::size_t j = free_hyp[m.col];
            auto prev = last_match.find(gts[i]->id);
            if (prev != last_match.end() && prev->second != hyps[j]->id) {
                ++counts.id_switches;
            }
            frame_matches.emplace_back(i, j);
        }

        for (const auto& [i, j] : frame_matches) {
            last_match[gts[i]->id] = hyps[j]->id;
            ++gt_frames_tracked[gts[i]->id];
        }
        counts.matches = static_cast<int>(frame_matches.size());
        counts.false_positives = counts.hypotheses - counts.matches;
        counts.misses = counts.gt - counts.matches;

        report.matches += counts.matches;
        report.false_positives += counts.false_positives;
        report.false_negatives += counts.misses;
        report.id_switches += counts.id_switches;
        report.per_frame.push_back(counts);
    }

    report.mota = report.gt_boxes == 0
                      ? std::numeric_limits<double>::quiet_NaN()
                      : 1.0 - static_cast<double>(report.false_negatives + report.false_positives +
                                                  report.id_switches) /
                                  static_cast<double>(report.gt_boxes);

    report.gt_ids = static_cast<int>(gt_frames_present.size());
    for (const auto& [id, present] : gt_frames_present) {
        const double ratio = static_cast<double>(gt_frames_tracked[id]) / static_cast<double>(present);
        if (ratio >= 0.8) {
            ++report.mostly_tracked;
        } else if (ratio < 0.2) {
            ++report.mostly_lost;
        } else {
            ++report.partially_tracked;
        }
    }

    // Identity matching: maximize the number of co-detected frames.
    std::vector<int> gt_list;
    for (const auto& [id, _] : gt_frames_present) {
        gt_list.push_back(id);
    }
    const std::vector<int> hyp_list(hyp_ids.begin(), hyp_ids.end());
    int max_overlap = 0;
    for (const auto& [_, n] : overlap) {
        max_overlap = std::max(max_overlap, n);
    }
    if (max_overlap > 0) {
        AffinityMatrix identity(gt_list.size(), hyp_list.size(), 0.0);
        for (std::size_t a = 0; a < gt_list.size(); ++a) {
            for (std::size_t b = 0; b < hyp_list.size(); ++b) {
                auto it = overlap.find({gt_list[a], hyp_list[b]});
                if (it != overlap.end()) {
                    identity.set(a, b, static_cast<double>(it->second) / max_overlap);
                }
            }
        }
        for (const auto& m : solve_assignment(identity)) {
            auto it = overlap.find({gt_list[m.row], hyp_list[m.col]});
            if (it != overlap.end()) {
                report.idtp += it->second;
            }
        }
    }
    const int total = report.gt_boxes + report.hyp_boxes;
    report.idf1 = total == 0 ? 1.0 : 2.0 * report.idtp / static_cast<double>(total);
    report.idp = report.hyp_boxes == 0 ? 0.0 : static_cast<double>(report.idtp) / report.hyp_boxes;
    report.idr = report.gt_boxes == 0 ? 0.0 : static_cast<double>(report.idtp) / report.gt_boxes;
    return report;
}

}  // namespace ngt
