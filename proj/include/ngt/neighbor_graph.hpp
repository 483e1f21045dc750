#pragma once

#include "ngt/core.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ngt {

/// Star-shaped graph around one target (a trajectory or a detection).
///
/// Node 0 holds the target's feature and is connected to every other node;
/// neighbor nodes connect only to the target and to themselves. When fewer
/// than K real neighbors exist, the remaining rows repeat the target feature
/// so that the graph always has K + 1 nodes.
struct NeighborGraph {
    Eigen::MatrixXd features;   // N x d, row 0 is the target
    Eigen::MatrixXd adjacency;  // N x N, 0/1 with self-loops
    std::size_t real_neighbors = 0;

    std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
};

/// Stack of graph-convolution layers Z <- ReLU(Â Z W). Layer l maps
/// dims[l] -> dims[l + 1].
struct GcnModel {
    std::vector<Eigen::MatrixXd> layers;
    Readout readout = Readout::TargetNode;

    std::vector<int> dims() const;
    int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().rows()); }
    int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().cols()); }

    /// Throws InvalidInput when the layer shapes do not chain.
    void validate() const;
};

/// 0/1 adjacency of an N-node star with self-loops: entry (i, j) is 1 iff i or j
/// is the target node or i == j.
Eigen::MatrixXd star_adjacency(std::size_t nodes);

/// Returns std::nullopt when k == 0 and there are no neighbors: the graph is
/// dropped and callers fall back to comparing raw features. Otherwise the graph
/// has k + 1 nodes, neighbors in the given order, then target copies.
/// Throws InvalidInput on dimension mismatch or more than k neighbors.
std::optional<NeighborGraph> build_graph(const Vector& target, std::span<const Vector> neighbors, int k);

/// D^-1/2 A D^-1/2 with D the row-sum degree matrix.
Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& adjacency);

/// Graph feature of the target: the model's readout after all layers. Entries are
/// non-negative because every layer ends in a ReLU.
Vector gcn_forward(const NeighborGraph& graph, const GcnModel& model);

/// 1 - cos(pred, label). A zero prediction has loss 1. Throws InvalidInput for a zero label.
double cosine_loss(const Vector& pred, const Vector& label);

struct LossGradient {
    double loss = 0.0;
    std::vector<Eigen::MatrixXd> layers;  // d loss / d W for each layer
};

/// Analytic gradient of cosine_loss(gcn_forward(graph, model), label) with respect
/// to each weight matrix. ReLU kinks take subgradient 0; a zero prediction yields
/// zero gradients.
LossGradient cosine_loss_grad(const NeighborGraph& graph, const GcnModel& model, const Vector& label);

/// Glorot-uniform weights, identical for identical (dims, seed).
GcnModel init_model(std::span<const int> dims, std::uint64_t seed, Readout readout = Readout::TargetNode);

struct TrainingSample {
    NeighborGraph graph;
    Vector label;
};

double mean_cosine_loss(const GcnModel& model, std::span<const TrainingSample> samples);

/// One full-batch gradient-descent step with a fixed step size. Returns the mean
/// loss before the update.
double gradient_descent_step(GcnModel& model, std::span<const TrainingSample> samples, double step_size);

}  // namespace ngt
