#include "ngt/core.hpp"

#include <cmath>

namespace ngt {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), source_(source), line_(line) {}

SchemaError::SchemaError(const std::string& field, const std::string& message)
    : std::runtime_error("'" + field + "': " + message), field_(field) {}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool BoundingBox::valid() const {
    return std::isfinite(left) && std::isfinite(top) && std::isfinite(width) && std::isfinite(height) &&
           width > 0.0 && height > 0.0;
}

BoundingBox make_box(double left, double top, double width, double height) {
    BoundingBox box{left, top, width, height};
    if (!box.valid()) {
        throw InvalidInput("bounding box needs finite coordinates and positive extent");
    }
    return box;
}

std::vector<int> default_gcn_dims(int embedding_dim) { return {embedding_dim, 128, 256, kGraphFeatureDim}; }

std::vector<int> TrackerConfig::layer_dims(int dim) const {
    if (gcn_layer_dims.empty()) {
        return default_gcn_dims(dim);
    }
    return gcn_layer_dims;
}

namespace {

void require_unit_interval(const char* field, double value) {
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
        throw SchemaError(field, "must lie in [0, 1]");
    }
}

}  // namespace

void TrackerConfig::validate() const {
    require_unit_interval("tau1", tau1);
    require_unit_interval("tau2", tau2);
    require_unit_interval("mu", mu);
    require_unit_interval("lambda_motion", lambda_motion);
    require_unit_interval("min_confidence", min_confidence);
    if (num_neighbors < 0) {
        throw SchemaError("K", "must be non-negative");
    }
    if (max_age < 0) {
        throw SchemaError("max_age", "must be non-negative");
    }
    if (!std::isfinite(gating_threshold) || gating_threshold <= 0.0) {
        throw SchemaError("gating_threshold", "must be positive");
    }
    if (embedding_dim < 0) {
        throw SchemaError("embedding_dim", "must be non-negative");
    }
    if (!gcn_layer_dims.empty()) {
        if (gcn_layer_dims.size() < 2) {
            throw SchemaError("gcn_layer_dims", "needs an input and at least one layer");
        }
        for (int dim : gcn_layer_dims) {
            if (dim <= 0) {
                throw SchemaError("gcn_layer_dims", "entries must be positive");
            }
        }
        if (gcn_layer_dims.back() != kGraphFeatureDim) {
            throw SchemaError("gcn_layer_dims", "last entry must be 2048");
        }
        if (embedding_dim > 0 && gcn_layer_dims.front() != embedding_dim) {
            throw SchemaError("gcn_layer_dims", "first entry must equal embedding_dim");
        }
    }
}

std::string to_string(Readout readout) { return readout == Readout::TargetNode ? "target" : "mean"; }

Readout readout_from_string(const std::string& name) {
    if (name == "target") {
        return Readout::TargetNode;
    }
    if (name == "mean") {
        return Readout::MeanPool;
    }
    throw SchemaError("readout", "expected \"target\" or \"mean\"");
}

}  // namespace ngt
