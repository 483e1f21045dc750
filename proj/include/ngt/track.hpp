#pragma once

#include "ngt/core.hpp"
#include "ngt/kalman.hpp"

#include <map>
#include <stdexcept>

namespace ngt {

enum class TrackState { Active, Lost, Removed };

struct Observation {
    BoundingBox box;
    Vector embedding;
};

struct Track {
    int id = 0;
    TrackState state = TrackState::Active;
    std::map<int, Observation> history;  // frame -> observation
    Vector smoothed_feature;
    KalmanState kalman;
    int age_since_update = 0;

    // Frame of the latest observation (the track's last active frame).
    int last_active_frame() const {
        if (history.empty()) {
            throw std::logic_error("track without history");
        }
        return history.rbegin()->first;
    }

    const Observation& last_observation() const { return history.rbegin()->second; }

    bool observed_at(int frame) const { return history.contains(frame); }
};

}  // namespace ngt
