#pragma once

#include "ngt/core.hpp"
#include "ngt/neighbor_graph.hpp"
#include "ngt/track.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ngt {

// Per-run counters exposing the cascade internals.
struct TrackerStats {
    std::size_t frames = 0;
    std::size_t round1_kept = 0;    // first-round matches at or above tau1
    std::size_t tau1_demoted = 0;   // first-round matches below tau1
    std::size_t round2_pairs = 0;   // track x detection pairs considered in the second round
    std::size_t round2_kept = 0;    // second-round matches at or above tau2
    std::size_t tau2_rejected = 0;  // second-round matches below tau2
    std::size_t graph_dropped = 0;  // second-round pairs scored without a neighbor graph
    std::size_t tracks_created = 0;

    TrackerStats& operator+=(const TrackerStats& other);
};

struct FrameReport {
    int frame = 0;
    AssociationResult initial;  // refined first round: matched = kept pairs
    AssociationResult second;   // second round over the first round's leftovers
    std::vector<int> created;   // ids of tracks born this frame
    TrackerStats stats;
};

// Online two-round association. Round one matches on fused appearance and
// motion affinity and keeps only confident pairs; round two re-scores the
// leftovers with graph features built from each target's matched neighbors.
class CascadeTracker {
public:
    CascadeTracker(TrackerConfig config, GcnModel model);

    // Consumes the detections of the next frame (frame() + 1) and returns the
    // boxes of active tracks, ordered by id. An empty span advances one frame.
    std::vector<LabeledBox> step(std::span<const Detection> detections);

    int frame() const noexcept { return frame_; }
    const std::vector<Track>& tracks() const noexcept { return tracks_; }
    const FrameReport& last_report() const noexcept { return report_; }
    const TrackerStats& totals() const noexcept { return totals_; }
    const TrackerConfig& config() const noexcept { return config_; }

private:
    void check_detections(std::span<const Detection> detections, int frame);

    TrackerConfig config_;
    GcnModel model_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
    int frame_ = 0;
    int dim_ = 0;
    FrameReport report_;
    TrackerStats totals_;
};

// Cosine of two graph features, 0 when either is the zero vector, clamped to [0, 1].
double graph_affinity(const Vector& a, const Vector& b);

struct SequenceResult {
    std::vector<std::vector<LabeledBox>> frames;  // frames[i] holds frame i + 1
    TrackerStats stats;

    std::vector<LabeledBox> flattened() const;
};

// frames[i] holds the detections of frame i + 1.
SequenceResult run_sequence(const TrackerConfig& config, const GcnModel& model,
                            std::span<const std::vector<Detection>> frames);

}  // namespace ngt
