#pragma once

#include "ngt/core.hpp"
#include "ngt/neighbor_graph.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ngt {

// Detection file:
//   # ngt-det v1 d=<int>[ seq=<name>]
//   frame,bb_left,bb_top,bb_width,bb_height,conf,e0,...,e{d-1}
// Rows are grouped by non-decreasing frame.
struct DetectionSequence {
    std::string name;  // empty unless the header names the sequence
    int embedding_dim = 0;
    std::vector<std::vector<Detection>> frames;  // frames[i] holds frame i + 1

    std::size_t detection_count() const;
};

DetectionSequence parse_detections(std::istream& in, const std::string& source);
DetectionSequence read_detections(const std::filesystem::path& path);
void write_detections(std::ostream& out, const DetectionSequence& sequence);
void write_detections(const std::filesystem::path& path, const DetectionSequence& sequence);

// MOT Challenge results: frame,id,bb_left,bb_top,bb_width,bb_height,conf,-1,-1,-1
// with two decimals for box values and conf written as 1.
std::vector<LabeledBox> parse_results(std::istream& in, const std::string& source);
std::vector<LabeledBox> read_results(const std::filesystem::path& path);
void write_results(std::ostream& out, std::span<const LabeledBox> boxes);
void write_results(const std::filesystem::path& path, std::span<const LabeledBox> boxes);

// Ground truth accepts the 10-column layout as well as the 9-column MOT16/17 layout
// (frame,id,left,top,width,height,consider,class,visibility). Rows whose
// consider/confidence column is 0 are skipped.
std::vector<LabeledBox> parse_ground_truth(std::istream& in, const std::string& source);
std::vector<LabeledBox> read_ground_truth(const std::filesystem::path& path);

// {"dims":[...],"layers":[{"rows":r,"cols":c,"data":[row-major]}...]}, reals
// printed with 17 significant digits.
GcnModel parse_weights(const std::string& text, const std::string& source);
GcnModel read_weights(const std::filesystem::path& path);
void write_weights(std::ostream& out, const GcnModel& model);
void write_weights(const std::filesystem::path& path, const GcnModel& model);

// Flat JSON object. Missing keys keep their defaults; unknown keys are rejected.
// Keys: tau1, tau2, K, mu, lambda_motion, max_age, min_confidence,
// gating_threshold, embedding_dim, gcn_layer_dims, readout.
TrackerConfig parse_config(const std::string& text, const std::string& source);
TrackerConfig read_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const TrackerConfig& config);
void write_config(const std::filesystem::path& path, const TrackerConfig& config);

std::string read_text_file(const std::filesystem::path& path);

// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);

}  // namespace ngt
