#pragma once

#include "ngt/core.hpp"
#include "ngt/track.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ngt {

// A pair kept by the first association round at the current frame.
struct RefinedMatch {
    const Track* track = nullptr;
    const Detection* detection = nullptr;
    std::size_t detection_index = 0;
};

// A track matched at the current frame that was also observed at the query
// trajectory's last active frame.
struct NeighborCandidate {
    int track_id = 0;
    std::size_t detection_index = 0;
    BoundingBox box_at_last;  // candidate's box at the query's last active frame
    BoundingBox box_at_t;     // candidate's newly matched detection box
    Vector track_feature;     // candidate's smoothed feature
    Vector det_feature;       // raw embedding of the matched detection
};

std::vector<NeighborCandidate> candidate_set(const Track& query, std::span<const RefinedMatch> refined_matches);

// Up to k candidates whose boxes at the query's last active frame are closest (by
// center distance) to the query's box at that frame. Ties go to the lower track id.
std::vector<NeighborCandidate> select_neighbors_for_track(const Track& query,
                                                          std::span<const NeighborCandidate> candidates, int k);

// Same rule at the current frame: distance from the detection's box to each
// candidate's matched detection box.
std::vector<NeighborCandidate> select_neighbors_for_detection(const Detection& query,
                                                              std::span<const NeighborCandidate> candidates, int k);

}  // namespace ngt
