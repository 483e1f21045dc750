#include "ngt/cascade_tracker.hpp"

#include "ngt/assignment.hpp"
#include "ngt/features.hpp"
#include "ngt/kalman.hpp"
#include "ngt/neighbor_select.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace ngt {

TrackerStats& TrackerStats::operator+=(const TrackerStats& o) {
    frames += o.frames;
    round1_kept += o.round1_kept;
    tau1_demoted += o.tau1_demoted;
    round2_pairs += o.round2_pairs;
    round2_kept += o.round2_kept;
    tau2_rejected += o.tau2_rejected;
    graph_dropped += o.graph_dropped;
    tracks_created += o.tracks_created;
    return *this;
}

double graph_affinity(const Vector& a, const Vector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) {
        return 0.0;
    }
    return std::clamp(a.dot(b) / (na * nb), 0.0, 1.0);
}

namespace {

double appearance_affinity(const Vector& a, const Vector& b) { return graph_affinity(a, b); }

std::vector<Vector> features_of(const std::vector<NeighborCandidate>& neighbors, bool track_side) {
    std::vector<Vector> out;
    out.reserve(neighbors.size());
    for (const auto& n : neighbors) {
        out.push_back(track_side ? n.track_feature : n.det_feature);
    }
    return out;
}

// Leftover indices after removing the kept ones.
std::vector<std::size_t> complement(std::size_t count, const std::vector<std::size_t>& used) {
    std::vector<char> taken(count, 0);
    for (auto i : used) {
        taken[i] = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < count; ++i) {
        if (!taken[i]) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace

CascadeTracker::CascadeTracker(TrackerConfig config, GcnModel model)
    : config_(std::move(config)), model_(std::move(model)), dim_(config_.embedding_dim) {
    if (config_.num_neighbors < 0) {
        throw InvalidInput("K must be non-negative");
    }
    model_.readout = config_.readout;
    if (config_.num_neighbors > 0) {
        model_.validate();
        if (dim_ > 0 && model_.input_dim() != dim_) {
            throw InvalidInput("GCN input dimension " + std::to_string(model_.input_dim()) +
                               " differs from the embedding dimension " + std::to_string(dim_));
        }
    }
}

void CascadeTracker::check_detections(std::span<const Detection> detections, int frame) {
    for (const auto& d : detections) {
        if (d.frame != frame) {
            throw InvalidInput("detection for frame " + std::to_string(d.frame) + " given at frame " +
                               std::to_string(frame));
        }
        if (!d.box.valid()) {
            throw InvalidInput("invalid detection box at frame " + std::to_string(frame));
        }
        if (!(d.confidence >= 0.0)) {
            throw InvalidInput("negative detection confidence at frame " + std::to_string(frame));
        }
        if (!d.embedding.allFinite()) {
            throw InvalidInput("non-finite embedding at frame " + std::to_string(frame));
        }
        if (dim_ == 0) {
            dim_ = static_cast<int>(d.embedding.size());
            if (config_.num_neighbors > 0 && model_.input_dim() != dim_) {
                throw InvalidInput("GCN input dimension " + std::to_string(model_.input_dim()) +
                                   " differs from the embedding dimension " + std::to_string(dim_));
            }
        }
        if (d.embedding.size() != dim_) {
            throw InvalidInput("embedding dimension " + std::to_string(d.embedding.size()) + " differs from " +
                               std::to_string(dim_));
        }
    }
}

std::vector<LabeledBox> CascadeTracker::step(std::span<const Detection> input) {
    const int frame = frame_ + 1;
    check_detections(input, frame);
    frame_ = frame;

    report_ = FrameReport{};
    report_.frame = frame;
    TrackerStats& stats = report_.stats;
    stats.frames = 1;

    std::vector<Detection> dets;
    for (const auto& d : input) {
        if (d.confidence >= config_.min_confidence) {
            dets.push_back(d);
        }
    }

    for (auto& t : tracks_) {
        t.kalman = kf_predict(t.kalman);
    }

    // Round one: fused appearance and motion affinity over every live track.
    const std::size_t n_tracks = tracks_.size();
    const std::size_t n_dets = dets.size();
    std::vector<double> gate(n_tracks * n_dets, 0.0);
    AffinityMatrix first(n_tracks, n_dets);
    const double lambda = config_.lambda_motion;
    for (std::size_t i = 0; i < n_tracks; ++i) {
        for (std::size_t j = 0; j < n_dets; ++j) {
            const double d2 = gating_distance(tracks_[i].kalman, dets[j].box);
            gate[i * n_dets + j] = d2;
            if (d2 > config_.gating_threshold) {
                continue;
            }
            const double appearance = appearance_affinity(tracks_[i].smoothed_feature, dets[j].embedding);
            first.set(i, j, lambda * appearance + (1.0 - lambda) * motion_affinity_from_distance(d2));
        }
    }
    const FilteredMatches initial = filter_matches(solve_assignment(first), first, config_.tau1);
    stats.round1_kept = initial.kept.size();
    stats.tau1_demoted = initial.demoted_rows.size();

    std::vector<std::size_t> kept_rows, kept_cols;
    std::vector<RefinedMatch> refined;
    for (const auto& m : initial.kept) {
        kept_rows.push_back(m.row);
        kept_cols.push_back(m.col);
        refined.push_back({&tracks_[m.row], &dets[m.col], m.col});
        report_.initial.matched.push_back({tracks_[m.row].id, m.col, first.at(m.row, m.col)});
    }
    const std::vector<std::size_t> left_tracks = complement(n_tracks, kept_rows);
    const std::vector<std::size_t> left_dets = complement(n_dets, kept_cols);
    for (auto i : left_tracks) {
        report_.initial.unmatched_tracks.push_back(tracks_[i].id);
    }
    report_.initial.unmatched_detections = left_dets;

    // Round two: graph features over the leftovers, neighbors drawn from the kept pairs.
    const int k = config_.num_neighbors;
    AffinityMatrix second(left_tracks.size(), left_dets.size());
    stats.round2_pairs = left_tracks.size() * left_dets.size();
    for (std::size_t a = 0; a < left_tracks.size(); ++a) {
        const Track& track = tracks_[left_tracks[a]];
        const std::vector<NeighborCandidate> candidates =
            k > 0 ? candidate_set(track, refined) : std::vector<NeighborCandidate>{};
        std::optional<Vector> track_graph_feature;
        for (std::size_t b = 0; b < left_dets.size(); ++b) {
            const Detection& det = dets[left_dets[b]];
            if (k == 0) {
                // build_graph drops every graph when K = 0.
                ++stats.graph_dropped;
            }
            if (gate[left_tracks[a] * n_dets + left_dets[b]] > config_.gating_threshold) {
                continue;
            }
            double sim = 0.0;
            if (k == 0) {
                sim = appearance_affinity(track.smoothed_feature, det.embedding);
            } else {
                if (!track_graph_feature) {
                    const auto neighbors = select_neighbors_for_track(track, candidates, k);
                    const auto feats = features_of(neighbors, true);
                    track_graph_feature = gcn_forward(*build_graph(track.smoothed_feature, feats, k), model_);
                }
                const auto neighbors = select_neighbors_for_detection(det, candidates, k);
                const auto feats = features_of(neighbors, false);
                const Vector det_graph_feature = gcn_forward(*build_graph(det.embedding, feats, k), model_);
                sim = graph_affinity(*track_graph_feature, det_graph_feature);
            }
            second.set(a, b, sim);
        }
    }
    const FilteredMatches rescued = filter_matches(solve_assignment(second), second, config_.tau2);
    stats.round2_kept = rescued.kept.size();
    stats.tau2_rejected = rescued.demoted_rows.size();

    std::vector<std::pair<std::size_t, std::size_t>> assignments;  // (track index, detection index)
    for (const auto& m : initial.kept) {
        assignments.emplace_back(m.row, m.col);
    }
    std::vector<std::size_t> rescued_rows, rescued_cols;
    for (const auto& m : rescued.kept) {
        const std::size_t ti = left_tracks[m.row];
        const std::size_t di = left_dets[m.col];
        assignments.emplace_back(ti, di);
        rescued_rows.push_back(m.row);
        rescued_cols.push_back(m.col);
        report_.second.matched.push_back({tracks_[ti].id, di, second.at(m.row, m.col)});
    }
    for (auto r : complement(left_tracks.size(), rescued_rows)) {
        report_.second.unmatched_tracks.push_back(tracks_[left_tracks[r]].id);
    }
    std::vector<std::size_t> unmatched_dets;
    for (auto c : complement(left_dets.size(), rescued_cols)) {
        unmatched_dets.push_back(left_dets[c]);
    }
    report_.second.unmatched_detections = unmatched_dets;

    // Matched tracks absorb their detection.
    std::vector<char> updated(n_tracks, 0);
    for (const auto& [ti, di] : assignments) {
        Track& t = tracks_[ti];
        const Detection& d = dets[di];
        t.kalman = kf_update(t.kalman, d.box);
        t.history[frame] = Observation{d.box, d.embedding};
        t.smoothed_feature = update_smoothed_feature(t.smoothed_feature, d.embedding, config_.mu);
        t.state = TrackState::Active;
        t.age_since_update = 0;
        updated[ti] = 1;
    }
    for (std::size_t i = 0; i < n_tracks; ++i) {
        if (updated[i]) {
            continue;
        }
        Track& t = tracks_[i];
        ++t.age_since_update;
        t.state = TrackState::Lost;
        if (t.age_since_update > config_.max_age) {
            t.state = TrackState::Removed;
        }
    }
    std::erase_if(tracks_, [](const Track& t) { return t.state == TrackState::Removed; });

    // Live tracks never look further back than max_age + 1 frames.
    const int oldest_needed = frame - config_.max_age - 1;
    for (auto& t : tracks_) {
        while (t.history.size() > 1 && t.history.begin()->first < oldest_needed) {
            t.history.erase(t.history.begin());
        }
    }

    for (auto di : unmatched_dets) {
        const Detection& d = dets[di];
        Track t;
        t.id = next_id_++;
        t.state = TrackState::Active;
        t.history[frame] = Observation{d.box, d.embedding};
        const double norm = d.embedding.norm();
        t.smoothed_feature = norm > 0.0 ? Vector(d.embedding / norm) : d.embedding;
        t.kalman = kf_initiate(d.box);
        report_.created.push_back(t.id);
        tracks_.push_back(std::move(t));
    }
    stats.tracks_created = unmatched_dets.size();
    totals_ += stats;

    std::vector<LabeledBox> out;
    for (const auto& t : tracks_) {
        if (t.state == TrackState::Active) {
            out.push_back({frame, t.id, t.history.at(frame).box});
        }
    }
    std::sort(out.begin(), out.end(), [](const LabeledBox& a, const LabeledBox& b) { return a.id < b.id; });
    return out;
}

std::vector<LabeledBox> SequenceResult::flattened() const {
    std::vector<LabeledBox> out;
    for (const auto& f : frames) {
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

SequenceResult run_sequence(const TrackerConfig& config, const GcnModel& model,
                            std::span<const std::vector<Detection>> frames) {
    CascadeTracker tracker(config, model);
    SequenceResult result;
    result.frames.reserve(frames.size());
    for (const auto& dets : frames) {
        result.frames.push_back(tracker.step(dets));
    }
    result.stats = tracker.totals();
    return result;
}

}  // namespace ngt
