#pragma once

#include "ngt/cascade_tracker.hpp"
#include "ngt/clearmot.hpp"
#include "ngt/core.hpp"
#include "ngt/io_formats.hpp"
#include "ngt/neighbor_graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ngt {

struct OcclusionWindow {
    int target = 0;  // ground-truth id
    int first_frame = 0;
    int last_frame = 0;  // inclusive

    bool contains(int id, int frame) const { return id == target && frame >= first_frame && frame <= last_frame; }
    bool operator==(const OcclusionWindow&) const = default;
};

// Co-walker scenario: groups of identities walk along parallel horizontal
// lanes, each member on a circle of radius `spread` around its group center.
struct ScenarioSpec {
    std::uint64_t seed = 1;
    int n_groups = 4;
    int group_size = 4;
    int frames = 200;
    double speed = 2.0;           // px per frame along +x
    double spread = 40.0;         // px, member offset from the group center
    double group_spacing = 300.0;  // px between lanes
    std::vector<OcclusionWindow> occlusions;  // explicit windows
    int occlusions_per_target = 0;            // random windows added per identity
    int occlusion_length = 15;
    double corruption = 0.0;  // rho: noise share of the embedding inside a window
    double dropout = 0.0;     // probability of a missed detection inside a window
    int embedding_dim = 32;
    double embedding_jitter = 0.02;  // noise share outside windows
    double box_jitter = 1.0;         // std of detection box offsets, px
    bool nonnegative_embeddings = true;  // embeddings and noise drawn from the positive orthant

    int identities() const { return n_groups * group_size; }

    // Throws SchemaError naming the offending field.
    void validate() const;
};

ScenarioSpec parse_scenario_spec(const std::string& text, const std::string& source);
ScenarioSpec read_scenario_spec(const std::filesystem::path& path);

struct Scenario {
    std::vector<LabeledBox> ground_truth;  // sorted by frame, then id
    DetectionSequence detections;
    std::vector<OcclusionWindow> windows;  // explicit and random, sorted
    std::vector<Vector> bases;             // bases[id - 1], unit norm
};

// Deterministic for a given spec.
Scenario generate(const ScenarioSpec& spec);

struct Variant {
    std::string name;
    TrackerConfig config;
};

struct AblationRow {
    std::string variant;
    EvalReport report;
    TrackerStats stats;
};

// Runs each variant on the same generated data. Variants with K > 0 use
// `weights` when given, otherwise a model initialized from `weight_seed`.
std::vector<AblationRow> ablation_run(const ScenarioSpec& spec, std::span<const Variant> variants,
                                      const std::optional<GcnModel>& weights = std::nullopt,
                                      std::uint64_t weight_seed = 0);

std::vector<AblationRow> ablation_run(const Scenario& scenario, std::span<const Variant> variants,
                                      const std::optional<GcnModel>& weights = std::nullopt,
                                      std::uint64_t weight_seed = 0);

// variant,mota,idf1,ids,fp,fn,mt,pt,ml,round1_kept,tau1_demoted,round2_kept,tau2_rejected,graph_dropped,tracks_created
void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows);

}  // namespace ngt
