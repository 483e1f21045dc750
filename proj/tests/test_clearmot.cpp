#include "ngt/clearmot.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

using namespace ngt;

namespace {

LabeledBox lb(int frame, int id, double left, double top = 0, double w = 10, double h = 10) {
    return {frame, id, {left, top, w, h}};
}

// Ground truth A (id 1) at x=0 and B (id 2) at x=100 for two frames.
std::vector<LabeledBox> two_object_truth() {
    return {lb(1, 1, 0), lb(1, 2, 100), lb(2, 1, 0), lb(2, 2, 100)};
}

}  // namespace

TEST(Iou, Examples) {
    const BoundingBox a{0, 0, 1, 1};
    EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
    EXPECT_DOUBLE_EQ(iou(a, {5, 5, 1, 1}), 0.0);
    EXPECT_DOUBLE_EQ(iou(a, {0.5, 0, 1, 1}), 1.0 / 3.0);
}

TEST(Evaluate, PerfectTracking) {
    const auto gt = two_object_truth();
    const EvalReport r = evaluate(gt, gt);
    EXPECT_DOUBLE_EQ(r.mota, 1.0);
    EXPECT_DOUBLE_EQ(r.idf1, 1.0);
    EXPECT_EQ(r.id_switches, 0);
    EXPECT_EQ(r.mostly_tracked, 2);
}

TEST(Evaluate, EmptyHypotheses) {
    std::vector<LabeledBox> gt;
    for (int f = 1; f <= 10; ++f) {
        gt.push_back(lb(f, 1, 0));
    }
    const EvalReport r = evaluate(gt, {});
    EXPECT_EQ(r.false_negatives, 10);
    EXPECT_EQ(r.false_positives, 0);
    EXPECT_DOUBLE_EQ(r.mota, 0.0);
    EXPECT_DOUBLE_EQ(r.idf1, 0.0);
    EXPECT_EQ(r.mostly_lost, 1);
}

// Frame 1: hyp 1 on A, hyp 3 on B. Frame 2: hyp 2 on A, hyp 3 on B.
// By hand: 4 matches, one switch on A; MOTA = 1 - 1/4. Identity matching pairs
// B with 3 (2 frames) and A with 1 or 2 (1 frame): IDTP = 3, IDF1 = 6/8.
TEST(Evaluate, HandWorkedIdentitySwitch) {
    const auto gt = two_object_truth();
    const std::vector<LabeledBox> hyp{lb(1, 1, 1), lb(1, 3, 101), lb(2, 2, 1), lb(2, 3, 101)};
    const EvalReport r = evaluate(gt, hyp);
    EXPECT_EQ(r.id_switches, 1);
    EXPECT_EQ(r.false_positives, 0);
    EXPECT_EQ(r.false_negatives, 0);
    EXPECT_EQ(r.matches, 4);
    EXPECT_DOUBLE_EQ(r.mota, 0.75);
    EXPECT_EQ(r.idtp, 3);
    EXPECT_DOUBLE_EQ(r.idf1, 0.75);
    EXPECT_DOUBLE_EQ(r.idp, 0.75);
    EXPECT_DOUBLE_EQ(r.idr, 0.75);
    ASSERT_EQ(r.per_frame.size(), 2u);
    EXPECT_EQ(r.per_frame[0].id_switches, 0);
    EXPECT_EQ(r.per_frame[1].id_switches, 1);
}

// Frame 1: hyp 1 on A, B missed, stray hyp 5. Frame 2: hyp 1 on A, hyp 2 on B.
// By hand: FN 1, FP 1, no switch (B's first match is not a switch); MOTA 0.5;
// IDTP = 2 (A-1) + 1 (B-2) over 4 + 4 boxes.
TEST(Evaluate, HandWorkedMissAndFalsePositive) {
    const auto gt = two_object_truth();
    const std::vector<LabeledBox> hyp{lb(1, 1, 0), lb(1, 5, 500), lb(2, 1, 0), lb(2, 2, 100)};
    const EvalReport r = evaluate(gt, hyp);
    EXPECT_EQ(r.false_negatives, 1);
    EXPECT_EQ(r.false_positives, 1);
    EXPECT_EQ(r.id_switches, 0);
    EXPECT_DOUBLE_EQ(r.mota, 0.5);
    EXPECT_EQ(r.idtp, 3);
    EXPECT_DOUBLE_EQ(r.idf1, 0.75);
}

TEST(Evaluate, KeepsPreviousCorrespondenceAboveThreshold) {
    const std::vector<LabeledBox> gt{lb(1, 1, 0), lb(2, 1, 0)};
    // In frame 2 hyp 2 overlaps better, but hyp 1 still clears 0.5 and is kept.
    const std::vector<LabeledBox> hyp{lb(1, 1, 0), lb(2, 1, 2), lb(2, 2, 0)};
    const EvalReport r = evaluate(gt, hyp);
    EXPECT_EQ(r.id_switches, 0);
    EXPECT_EQ(r.false_positives, 1);
    EXPECT_EQ(r.matches, 2);
}

TEST(Evaluate, SwitchesWhenPreviousCorrespondenceDropsBelowThreshold) {
    const std::vector<LabeledBox> gt{lb(1, 1, 0), lb(2, 1, 0)};
    const std::vector<LabeledBox> hyp{lb(1, 1, 0), lb(2, 1, 6), lb(2, 2, 0)};
    const EvalReport r = evaluate(gt, hyp);
    EXPECT_EQ(r.id_switches, 1);
}

TEST(Evaluate, MostlyTrackedBoundary) {
    std::vector<LabeledBox> gt, hyp;
    for (int f = 1; f <= 10; ++f) {
        gt.push_back(lb(f, 1, 0));
        gt.push_back(lb(f, 2, 100));
        if (f <= 8) {
            hyp.push_back(lb(f, 1, 0));  // 80% recovered: mostly tracked
        }
        if (f <= 2) {
            hyp.push_back(lb(f, 2, 100));  // 20% recovered: partially tracked
        }
    }
    const EvalReport r = evaluate(gt, hyp);
    EXPECT_EQ(r.mostly_tracked, 1);
    EXPECT_EQ(r.partially_tracked, 1);
    EXPECT_EQ(r.mostly_lost, 0);
}

TEST(Evaluate, RejectsMalformedInput) {
    EXPECT_THROW(evaluate(std::vector<LabeledBox>{lb(0, 1, 0)}, {}), InvalidInput);
    EXPECT_THROW(evaluate(std::vector<LabeledBox>{lb(1, 0, 0)}, {}), InvalidInput);
    EXPECT_THROW(evaluate(std::vector<LabeledBox>{lb(1, 1, 0), lb(1, 1, 50)}, {}), InvalidInput);
    EXPECT_THROW(evaluate({}, std::vector<LabeledBox>{lb(1, 1, 0, 0, 0, 10)}), InvalidInput);
}

TEST(Evaluate, NoGroundTruthGivesNanMota) {
    const EvalReport r = evaluate({}, std::vector<LabeledBox>{lb(1, 1, 0)});
    EXPECT_TRUE(std::isnan(r.mota));
    EXPECT_EQ(r.false_positives, 1);
}

TEST(Evaluate, RandomizedProperties) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> jitter(-4, 4);
    std::bernoulli_distribution keep(0.8), swap(0.05);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<LabeledBox> gt, hyp;
        std::map<int, int> label;  // gt id -> current hyp id
        int next = 10;
        for (int f = 1; f <= 30; ++f) {
            for (int id = 1; id <= 5; ++id) {
                gt.push_back(lb(f, id, 40.0 * id + f, 0, 20, 40));
                if (!label.contains(id) || swap(rng)) {
                    label[id] = next++;
                }
                if (keep(rng)) {
                    hyp.push_back(lb(f, label[id], 40.0 * id + f + jitter(rng), jitter(rng), 20, 40));
                }
            }
            if (keep(rng)) {
                hyp.push_back(lb(f, 999, 1000, 1000));
            }
        }
        const EvalReport r = evaluate(gt, hyp);
        EXPECT_LE(r.mota, 1.0);
        EXPECT_EQ(r.mota, 1.0 - static_cast<double>(r.false_negatives + r.false_positives + r.id_switches) /
                                    static_cast<double>(r.gt_boxes));
        for (const auto& fc : r.per_frame) {
            EXPECT_EQ(fc.false_positives + fc.matches, fc.hypotheses);
            EXPECT_EQ(fc.misses + fc.matches, fc.gt);
        }

        // Renaming hypothesis ids by a bijection changes nothing.
        std::vector<LabeledBox> renamed = hyp;
        for (auto& b : renamed) {
            b.id = 5000 - b.id;
        }
        const EvalReport rr = evaluate(gt, renamed);
        EXPECT_EQ(rr.id_switches, r.id_switches);
        EXPECT_EQ(rr.idtp, r.idtp);
        EXPECT_EQ(rr.mota, r.mota);
    }
}

TEST(Evaluate, StricterIouNeverReducesErrors) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0, 3);
    std::vector<LabeledBox> gt, hyp;
    for (int f = 1; f <= 20; ++f) {
        for (int id = 1; id <= 4; ++id) {
            gt.push_back(lb(f, id, 100.0 * id, 0, 30, 60));
            hyp.push_back(lb(f, id, 100.0 * id + n(rng), n(rng), 30, 60));
        }
    }
    const EvalReport loose = evaluate(gt, hyp, 0.5);
    const EvalReport strict = evaluate(gt, hyp, 0.99);
    EXPECT_GE(strict.false_negatives, loose.false_negatives);
    EXPECT_GE(strict.false_positives, loose.false_positives);
    EXPECT_GT(strict.false_negatives, 0);
}
