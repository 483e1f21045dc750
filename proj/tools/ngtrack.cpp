// ngtrack: command-line front end for the cascade tracker.
//
//   ngtrack track --det dets.txt --config cfg.json [--weights w.json] [--seed N] --out res.txt
//   ngtrack evaluate --gt gt.txt --res res.txt [--iou 0.5]
//   ngtrack simulate --spec scenario.json --out-gt gt.txt --out-det dets.txt
//   ngtrack ablate --spec scenario.json --configs full.json baseline.json [--out table.csv]
//   ngtrack init-weights --dims 32,128,256,2048 --seed 7 --out w.json
//
// Exit codes: 0 success, 1 runtime or input failure, 2 usage error.

#include "ngt/cascade_tracker.hpp"
#include "ngt/clearmot.hpp"
#include "ngt/io_formats.hpp"
#include "ngt/neighbor_graph.hpp"
#include "ngt/synth.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

void print_summary(const ngt::TrackerStats& s) {
    std::cout << "frames=" << s.frames << " round1_kept=" << s.round1_kept << " tau1_demoted=" << s.tau1_demoted
              << " round2_pairs=" << s.round2_pairs << " round2_kept=" << s.round2_kept
              << " tau2_rejected=" << s.tau2_rejected << " graph_dropped=" << s.graph_dropped
              << " tracks_created=" << s.tracks_created << '\n';
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

void print_report(const ngt::EvalReport& r) {
    std::cout << "MOTA=" << fixed(r.mota, 3) << " IDF1=" << fixed(r.idf1, 3) << " IDS=" << r.id_switches << '\n';
    const std::vector<std::pair<std::string, std::string>> rows = {
        {"MOTA", fixed(r.mota, 4)},
        {"IDF1", fixed(r.idf1, 4)},
        {"IDP", fixed(r.idp, 4)},
        {"IDR", fixed(r.idr, 4)},
        {"IDS", std::to_string(r.id_switches)},
        {"FP", std::to_string(r.false_positives)},
        {"FN", std::to_string(r.false_negatives)},
        {"matches", std::to_string(r.matches)},
        {"MT", std::to_string(r.mostly_tracked)},
        {"PT", std::to_string(r.partially_tracked)},
        {"ML", std::to_string(r.mostly_lost)},
        {"GT ids", std::to_string(r.gt_ids)},
        {"GT boxes", std::to_string(r.gt_boxes)},
        {"hyp boxes", std::to_string(r.hyp_boxes)},
    };
    for (const auto& [name, value] : rows) {
        std::cout << "  " << name << std::string(12 - name.size(), ' ') << std::string(10 - value.size(), ' ')
                  << value << '\n';
    }
    std::cout << "mota,idf1,idp,idr,ids,fp,fn,matches,mt,pt,ml,gt_ids,gt_boxes,hyp_boxes\n"
              << fixed(r.mota, 6) << ',' << fixed(r.idf1, 6) << ',' << fixed(r.idp, 6) << ',' << fixed(r.idr, 6)
              << ',' << r.id_switches << ',' << r.false_positives << ',' << r.false_negatives << ',' << r.matches
              << ',' << r.mostly_tracked << ',' << r.partially_tracked << ',' << r.mostly_lost << ',' << r.gt_ids
              << ',' << r.gt_boxes << ',' << r.hyp_boxes << '\n';
}

std::vector<int> parse_dims(const std::string& text) {
    std::vector<int> dims;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || v <= 0) {
            throw ngt::InvalidInput("--dims expects comma-separated positive integers, got '" + text + "'");
        }
        dims.push_back(v);
    }
    return dims;
}

// Resolves the model for a config: loaded weights, or a seeded initialization.
ngt::GcnModel model_for(const ngt::TrackerConfig& config, int dim, const std::optional<ngt::GcnModel>& weights,
                        std::uint64_t seed) {
    if (config.num_neighbors == 0) {
        return {};
    }
    const std::vector<int> expected = config.layer_dims(dim);
    if (weights) {
        if (weights->dims() != expected) {
            throw ngt::InvalidInput("weights do not match the configured GCN dimensions");
        }
        return *weights;
    }
    return ngt::init_model(expected, seed, config.readout);
}

struct TrackArgs {
    std::string det, config, weights, out;
    std::uint64_t seed = 0;
};

int run_track(const TrackArgs& a) {
    const ngt::DetectionSequence seq = ngt::read_detections(a.det);
    ngt::TrackerConfig config = ngt::read_config(a.config);
    if (config.embedding_dim != 0 && config.embedding_dim != seq.embedding_dim) {
        throw ngt::InvalidInput("config embedding_dim " + std::to_string(config.embedding_dim) +
                                " differs from the detection file's d=" + std::to_string(seq.embedding_dim));
    }
    config.embedding_dim = seq.embedding_dim;
    std::optional<ngt::GcnModel> weights;
    if (!a.weights.empty()) {
        weights = ngt::read_weights(a.weights);
    }
    const ngt::GcnModel model = model_for(config, seq.embedding_dim, weights, a.seed);
    const ngt::SequenceResult result = ngt::run_sequence(config, model, seq.frames);
    const auto boxes = result.flattened();
    ngt::write_results(fs::path(a.out), boxes);
    print_summary(result.stats);
    return 0;
}

int run_evaluate(const std::string& gt, const std::string& res, double iou) {
    const auto truth = ngt::read_ground_truth(gt);
    const auto hyp = ngt::read_results(res);
    print_report(ngt::evaluate(truth, hyp, iou));
    return 0;
}

int run_simulate(const std::string& spec_path, const std::string& out_gt, const std::string& out_det,
                 std::optional<std::uint64_t> seed) {
    ngt::ScenarioSpec spec = ngt::read_scenario_spec(spec_path);
    if (seed) {
        spec.seed = *seed;
    }
    const ngt::Scenario scenario = ngt::generate(spec);
    ngt::write_results(fs::path(out_gt), scenario.ground_truth);
    ngt::write_detections(fs::path(out_det), scenario.detections);
    std::cout << "identities=" << spec.identities() << " frames=" << spec.frames
              << " detections=" << scenario.detections.detection_count()
              << " occlusion_windows=" << scenario.windows.size() << '\n';
    return 0;
}

int run_ablate(const std::string& spec_path, const std::vector<std::string>& config_paths,
               const std::string& weights_path, std::uint64_t seed, const std::string& out) {
    const ngt::ScenarioSpec spec = ngt::read_scenario_spec(spec_path);
    std::vector<ngt::Variant> variants;
    for (const auto& p : config_paths) {
        variants.push_back({fs::path(p).stem().string(), ngt::read_config(p)});
    }
    std::optional<ngt::GcnModel> weights;
    if (!weights_path.empty()) {
        weights = ngt::read_weights(weights_path);
    }
    const auto rows = ngt::ablation_run(spec, variants, weights, seed);
    if (out.empty()) {
        ngt::write_ablation_csv(std::cout, rows);
    } else {
        std::ofstream file(out, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw std::runtime_error("cannot write " + out);
        }
        ngt::write_ablation_csv(file, rows);
    }
    return 0;
}

int run_init_weights(const std::string& dims_text, std::uint64_t seed, const std::string& out) {
    const std::vector<int> dims = parse_dims(dims_text);
    if (dims.size() < 2 || dims.back() != ngt::kGraphFeatureDim) {
        throw ngt::InvalidInput("--dims must list the input dimension and end at " +
                                std::to_string(ngt::kGraphFeatureDim));
    }
    ngt::write_weights(fs::path(out), ngt::init_model(dims, seed));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online multi-object tracker with neighbor-graph re-association"};
    app.require_subcommand(1);

    TrackArgs track;
    auto* track_cmd = app.add_subcommand("track", "Track a detection file and write MOT-format results");
    track_cmd->add_option("--det", track.det, "Detection file")->required();
    track_cmd->add_option("--config", track.config, "Tracker config (JSON)")->required();
    track_cmd->add_option("--weights", track.weights, "GCN weights (JSON); seeded init when omitted");
    track_cmd->add_option("--seed", track.seed, "Seed for GCN initialization");
    track_cmd->add_option("--out", track.out, "Results file")->required();

    std::string gt, res;
    double iou = 0.5;
    auto* eval_cmd = app.add_subcommand("evaluate", "Compute CLEAR MOT and identity metrics");
    eval_cmd->add_option("--gt", gt, "Ground-truth file")->required();
    eval_cmd->add_option("--res", res, "Results file")->required();
    eval_cmd->add_option("--iou", iou, "IoU threshold for a match")->check(CLI::Range(0.0, 1.0));

    std::string spec_path, out_gt, out_det;
    std::optional<std::uint64_t> sim_seed;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic co-walker scenario");
    sim_cmd->add_option("--spec", spec_path, "Scenario spec (JSON)")->required();
    sim_cmd->add_option("--out-gt", out_gt, "Ground-truth output")->required();
    sim_cmd->add_option("--out-det", out_det, "Detection output")->required();
    sim_cmd->add_option("--seed", sim_seed, "Override the scenario seed");

    std::string ablate_spec, ablate_weights, ablate_out;
    std::vector<std::string> configs;
    std::uint64_t ablate_seed = 0;
    auto* ablate_cmd = app.add_subcommand("ablate", "Compare tracker configs on one synthetic scenario");
    ablate_cmd->add_option("--spec", ablate_spec, "Scenario spec (JSON)")->required();
    ablate_cmd->add_option("--configs", configs, "Tracker configs, one variant each")->required();
    ablate_cmd->add_option("--weights", ablate_weights, "GCN weights shared by variants with K > 0");
    ablate_cmd->add_option("--seed", ablate_seed, "Seed for GCN initialization");
    ablate_cmd->add_option("--out", ablate_out, "CSV output (default: standard output)");

    std::string dims;
    std::uint64_t init_seed = 0;
    std::string init_out;
    auto* init_cmd = app.add_subcommand("init-weights", "Write seeded GCN weights");
    init_cmd->add_option("--dims", dims, "Layer dimensions, e.g. 32,128,256,2048")->required();
    init_cmd->add_option("--seed", init_seed, "Initialization seed");
    init_cmd->add_option("--out", init_out, "Weights file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (track_cmd->parsed()) {
            return run_track(track);
        }
        if (eval_cmd->parsed()) {
            return run_evaluate(gt, res, iou);
        }
        if (sim_cmd->parsed()) {
            return run_simulate(spec_path, out_gt, out_det, sim_seed);
        }
        if (ablate_cmd->parsed()) {
            return run_ablate(ablate_spec, configs, ablate_weights, ablate_seed, ablate_out);
        }
        if (init_cmd->parsed()) {
            return run_init_weights(dims, init_seed, init_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "ngtrack: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
