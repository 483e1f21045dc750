#include "ngt/neighbor_graph.hpp"

#include "ngt/features.hpp"

#include <cmath>
#include <random>
#include <string>

namespace ngt {

std::vector<int> GcnModel::dims() const {
    std::vector<int> out;
    if (layers.empty()) {
        return out;
    }
    out.push_back(static_cast<int>(layers.front().rows()));
    for (const auto& w : layers) {
        out.push_back(static_cast<int>(w.cols()));
    }
    return out;
}

void GcnModel::validate() const {
    if (layers.empty()) {
        throw InvalidInput("GCN model has no layers");
    }
    for (std::size_t l = 1; l < layers.size(); ++l) {
        if (layers[l].rows() != layers[l - 1].cols()) {
            throw InvalidInput("GCN layer " + std::to_string(l) + " expects " + std::to_string(layers[l].rows()) +
                               " inputs but the previous layer produces " + std::to_string(layers[l - 1].cols()));
        }
    }
}

Eigen::MatrixXd star_adjacency(std::size_t nodes) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(nodes, nodes);
    if (nodes > 0) {
        a.row(0).setOnes();
        a.col(0).setOnes();
    }
    return a;
}

std::optional<NeighborGraph> build_graph(const Vector& target, std::span<const Vector> neighbors, int k) {
    if (k < 0) {
        throw InvalidInput("neighbor count must be non-negative");
    }
    if (neighbors.size() > static_cast<std::size_t>(k)) {
        throw InvalidInput("more neighbors than K");
    }
    if (k == 0) {
        return std::nullopt;
    }
    const auto n = static_cast<Eigen::Index>(k) + 1;
    NeighborGraph g;
    g.features.resize(n, target.size());
    g.features.row(0) = target.transpose();
    Eigen::Index row = 1;
    for (const auto& v : neighbors) {
        if (v.size() != target.size()) {
            throw InvalidInput("neighbor feature dimension differs from the target's");
        }
        g.features.row(row++) = v.transpose();
    }
    for (; row < n; ++row) {
        g.features.row(row) = target.transpose();
    }
    g.adjacency = star_adjacency(static_cast<std::size_t>(n));
    g.real_neighbors = neighbors.size();
    return g;
}

Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& adjacency) {
    const Eigen::VectorXd inv_sqrt_degree = adjacency.rowwise().sum().array().rsqrt();
    return inv_sqrt_degree.asDiagonal() * adjacency * inv_sqrt_degree.asDiagonal();
}

namespace {

void check_compatible(const NeighborGraph& graph, const GcnModel& model) {
    model.validate();
    if (graph.features.cols() != model.input_dim()) {
        throw InvalidInput("graph features have dimension " + std::to_string(graph.features.cols()) +
                           " but the model expects " + std::to_string(model.input_dim()));
    }
    if (graph.adjacency.rows() != graph.features.rows() || graph.adjacency.cols() != graph.features.rows()) {
        throw InvalidInput("adjacency does not match node count");
    }
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& m) { return m.cwiseMax(0.0); }

// Activations kept for backpropagation. aggregated[l] = Â Z_l, pre[l] = Â Z_l W_l.
struct ForwardTrace {
    std::vector<Eigen::MatrixXd> aggregated;
    std::vector<Eigen::MatrixXd> pre;
    Vector readout;
};

ForwardTrace forward_trace(const NeighborGraph& graph, const GcnModel& model) {
    const Eigen::MatrixXd a_hat = normalize_adjacency(graph.adjacency);
    ForwardTrace trace;
    Eigen::MatrixXd z = graph.features;
    for (const auto& w : model.layers) {
        trace.aggregated.push_back(a_hat * z);
        trace.pre.push_back(trace.aggregated.back() * w);
        z = relu(trace.pre.back());
    }
    if (model.readout == Readout::TargetNode) {
        trace.readout = z.row(0).transpose();
    } else {
        trace.readout = z.colwise().mean().transpose();
    }
    return trace;
}

}  // namespace

Vector gcn_forward(const NeighborGraph& graph, const GcnModel& model) {
    check_compatible(graph, model);
    const Eigen::MatrixXd a_hat = normalize_adjacency(graph.adjacency);
    Eigen::MatrixXd z = graph.features;
    const std::size_t last = model.layers.size() - 1;
    for (std::size_t l = 0; l < last; ++l) {
        z = relu((a_hat * z) * model.layers[l]);
    }
    if (model.readout == Readout::TargetNode) {
        // Only the target row of the final layer is read out.
        const Eigen::RowVectorXd aggregated = a_hat.row(0) * z;
        return (aggregated * model.layers[last]).cwiseMax(0.0).transpose();
    }
    return relu((a_hat * z) * model.layers[last]).colwise().mean().transpose();
}

double cosine_loss(const Vector& pred, const Vector& label) {
    if (pred.size() != label.size()) {
        throw InvalidInput("prediction and label dimensions differ");
    }
    if (!(label.norm() > 0.0)) {
        throw InvalidInput("cosine loss needs a non-zero label");
    }
    if (!(pred.norm() > 0.0)) {
        return 1.0;
    }
    return 1.0 - cosine_similarity(pred, label);
}

LossGradient cosine_loss_grad(const NeighborGraph& graph, const GcnModel& model, const Vector& label) {
    check_compatible(graph, model);
    if (label.size() != model.output_dim()) {
        throw InvalidInput("label dimension differs from the model output");
    }
    const ForwardTrace trace = forward_trace(graph, model);
    LossGradient out;
    out.loss = cosine_loss(trace.readout, label);
    for (const auto& w : model.layers) {
        out.layers.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    const double pn = trace.readout.norm();
    if (!(pn > 0.0)) {
        return out;
    }

    // d(1 - cos)/dp = -(y / (|p||y|) - cos * p / |p|^2)
    const double yn = label.norm();
    const double cos = 1.0 - out.loss;
    const Vector d_readout = -(label / (pn * yn) - cos * trace.readout / (pn * pn));

    const Eigen::MatrixXd a_hat = normalize_adjacency(graph.adjacency);
    const auto n = static_cast<Eigen::Index>(graph.size());
    Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(n, model.output_dim());
    if (model.readout == Readout::TargetNode) {
        upstream.row(0) = d_readout.transpose();
    } else {
        upstream.rowwise() = d_readout.transpose() / static_cast<double>(n);
    }

    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const Eigen::MatrixXd d_pre =
            upstream.cwiseProduct((trace.pre[l].array() > 0.0).cast<double>().matrix());
        out.layers[l] = trace.aggregated[l].transpose() * d_pre;
        if (l > 0) {
            upstream = a_hat.transpose() * (d_pre * model.layers[l].transpose());
        }
    }
    return out;
}

GcnModel init_model(std::span<const int> dims, std::uint64_t seed, Readout readout) {
    if (dims.size() < 2) {
        throw InvalidInput("a GCN needs an input dimension and at least one layer");
    }
    for (int d : dims) {
        if (d <= 0) {
            throw InvalidInput("GCN dimensions must be positive");
        }
    }
    std::mt19937_64 rng(seed);
    // 53 random mantissa bits -> [0, 1); spelled out so values do not depend on the
    // standard library's distribution implementation.
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    GcnModel model;
    model.readout = readout;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int fan_in = dims[l];
        const int fan_out = dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Eigen::MatrixXd w(fan_in, fan_out);
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                w(r, c) = (2.0 * unit() - 1.0) * bound;
            }
        }
        model.layers.push_back(std::move(w));
    }
    return model;
}

double mean_cosine_loss(const GcnModel& model, std::span<const TrainingSample> samples) {
    if (samples.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto& s : samples) {
        total += cosine_loss(gcn_forward(s.graph, model), s.label);
    }
    return total / static_cast<double>(samples.size());
}

double gradient_descent_step(GcnModel& model, std::span<const TrainingSample> samples, double step_size) {
    if (samples.empty()) {
        return 0.0;
    }
    std::vector<Eigen::MatrixXd> sum;
    for (const auto& w : model.layers) {
        sum.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    double loss = 0.0;
    for (const auto& s : samples) {
        const LossGradient g = cosine_loss_grad(s.graph, model, s.label);
        loss += g.loss;
        for (std::size_t l = 0; l < sum.size(); ++l) {
            sum[l] += g.layers[l];
        }
    }
    const double scale = step_size / static_cast<double>(samples.size());
    for (std::size_t l = 0; l < sum.size(); ++l) {
        model.layers[l] -= scale * sum[l];
    }
    return loss / static_cast<double>(samples.size());
}

}  // namespace ngt
