#pragma once

#include "ngt/core.hpp"

#include <span>
#include <vector>

namespace ngt {

double iou(const BoundingBox& a, const BoundingBox& b);

struct FrameCounts {
    int frame = 0;
    int gt = 0;
    int hypotheses = 0;
    int matches = 0;
    int false_positives = 0;
    int misses = 0;
    int id_switches = 0;
};

struct EvalReport {
    double mota = 0.0;
    double idf1 = 0.0;
    double idp = 0.0;
    double idr = 0.0;
    int false_positives = 0;
    int false_negatives = 0;
    int id_switches = 0;
    int matches = 0;
    int idtp = 0;
    int mostly_tracked = 0;
    int partially_tracked = 0;
    int mostly_lost = 0;
    int gt_ids = 0;
    int gt_boxes = 0;
    int hyp_boxes = 0;
    std::vector<FrameCounts> per_frame;

    double mostly_tracked_ratio() const { return gt_ids == 0 ? 0.0 : static_cast<double>(mostly_tracked) / gt_ids; }
    double mostly_lost_ratio() const { return gt_ids == 0 ? 0.0 : static_cast<double>(mostly_lost) / gt_ids; }
};

// CLEAR MOT and identity metrics. Per frame, correspondences from the previous
// frames are kept while their IoU stays at or above the threshold; the rest are
// matched by maximum total IoU. IDF1 comes from a global one-to-one matching of
// ground-truth and hypothesis identities maximizing co-detected frames.
// MOTA is NaN when there are no ground-truth boxes.
// Throws InvalidInput for non-positive frames or ids, invalid boxes, or an id
// repeated within one frame.
EvalReport evaluate(std::span<const LabeledBox> ground_truth, std::span<const LabeledBox> hypotheses,
                    double iou_threshold = 0.5);

}  // namespace ngt
