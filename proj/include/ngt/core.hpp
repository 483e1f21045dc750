#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ngt {

using Vector = Eigen::VectorXd;

// Raised when a caller violates an operation's preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text input. Carries the source name and 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message);

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

// Structurally valid document whose content violates the schema. Carries the field path.
class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& field, const std::string& message);

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Point& a, const Point& b);

// Axis-aligned box in pixels, MOT convention (top-left corner plus extent).
struct BoundingBox {
    double left = 0.0;
    double top = 0.0;
    double width = 1.0;
    double height = 1.0;

    Point center() const { return {left + width / 2.0, top + height / 2.0}; }
    double area() const { return width * height; }
    bool valid() const;

    BoundingBox translated(double dx, double dy) const { return {left + dx, top + dy, width, height}; }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Throws InvalidInput unless width and height are strictly positive and all fields finite.
BoundingBox make_box(double left, double top, double width, double height);

struct Detection {
    int frame = 0;
    BoundingBox box;
    double confidence = 0.0;
    Vector embedding;
};

// A box with an identity, as found in ground-truth and result files.
struct LabeledBox {
    int frame = 0;
    int id = 0;
    BoundingBox box;

    friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

struct Match {
    int track_id = 0;
    std::size_t detection = 0;
    double affinity = 0.0;
};

// Outcome of one association round. Every input track id and detection index
// appears in exactly one of the three lists.
struct AssociationResult {
    std::vector<Match> matched;
    std::vector<int> unmatched_tracks;
    std::vector<std::size_t> unmatched_detections;
};

enum class Readout { TargetNode, MeanPool };

inline constexpr int kGraphFeatureDim = 2048;
// 0.95 quantile of the chi-square distribution with 4 degrees of freedom.
inline constexpr double kChiSquare95FourDof = 9.4877;

struct TrackerConfig {
    double tau1 = 0.85;
    double tau2 = 0.95;
    int num_neighbors = 4;
    double mu = 0.9;
    double lambda_motion = 0.98;  // appearance weight in the first-round affinity
    int max_age = 30;
    double min_confidence = 0.4;
    double gating_threshold = kChiSquare95FourDof;
    int embedding_dim = 0;          // 0: taken from the detection input
    std::vector<int> gcn_layer_dims;  // empty: default_gcn_dims(embedding_dim)
    Readout readout = Readout::TargetNode;

    // Layer dimensions with defaults resolved for the given embedding dimension.
    std::vector<int> layer_dims(int embedding_dim) const;

    // Range checks for file-supplied configurations. Throws SchemaError naming the field.
    void validate() const;
};

// Input d followed by three GCN layers ending at the graph-feature dimension.
std::vector<int> default_gcn_dims(int embedding_dim);

std::string to_string(Readout readout);
Readout readout_from_string(const std::string& name);

}  // namespace ngt
