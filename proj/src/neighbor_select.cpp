#include "ngt/neighbor_select.hpp"

#include <algorithm>
#include <numeric>

namespace ngt {

std::vector<NeighborCandidate> candidate_set(const Track& query, std::span<const RefinedMatch> refined_matches) {
    const int last = query.last_active_frame();
    std::vector<NeighborCandidate> out;
    for (const auto& match : refined_matches) {
        const Track& track = *match.track;
        if (track.id == query.id) {
            continue;
        }
        auto it = track.history.find(last);
        if (it == track.history.end()) {
            continue;
        }
        out.push_back({track.id, match.detection_index, it->second.box, match.detection->box, track.smoothed_feature,
                       match.detection->embedding});
    }
    return out;
}

namespace {

template <typename BoxOf>
std::vector<NeighborCandidate> nearest(const Point& anchor, std::span<const NeighborCandidate> candidates, int k,
                                       BoxOf box_of) {
    if (k <= 0 || candidates.empty()) {
        return {};
    }
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        dist[i] = distance(anchor, box_of(candidates[i]).center());
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) {
            return dist[a] < dist[b];
        }
        return candidates[a].track_id < candidates[b].track_id;
    });
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(k), candidates.size());
    std::vector<NeighborCandidate> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(candidates[order[i]]);
    }
    return out;
}

}  // namespace

std::vector<NeighborCandidate> select_neighbors_for_track(const Track& query,
                                                          std::span<const NeighborCandidate> candidates, int k) {
    const Point anchor = query.last_observation().box.center();
    return nearest(anchor, candidates, k, [](const NeighborCandidate& c) -> const BoundingBox& { return c.box_at_last; });
}

std::vector<NeighborCandidate> select_neighbors_for_detection(const Detection& query,
                                                              std::span<const NeighborCandidate> candidates, int k) {
    return nearest(query.box.center(), candidates, k,
                   [](const NeighborCandidate& c) -> const BoundingBox& { return c.box_at_t; });
}

}  // namespace ngt
