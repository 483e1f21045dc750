#include "ngt/neighbor_graph.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace ngt;

namespace {

GcnModel small_model(std::uint64_t seed, std::vector<int> dims = {4, 8, 16, kGraphFeatureDim}) {
    return init_model(dims, seed);
}

}  // namespace

TEST(StarAdjacency, EnumeratesDefinition) {
    for (std::size_t n = 1; n <= 9; ++n) {
        const Eigen::MatrixXd a = star_adjacency(n);
        ASSERT_EQ(a.rows(), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double expected = (i == 0 || j == 0 || i == j) ? 1.0 : 0.0;
                EXPECT_EQ(a(i, j), expected) << n << ": " << i << "," << j;
            }
        }
    }
}

TEST(BuildGraph, PadsWithTargetCopies) {
    const Vector t{{1, 2}};
    const std::vector<Vector> neighbors{Vector{{3, 4}}};
    const auto g = build_graph(t, neighbors, 2);
    ASSERT_TRUE(g.has_value());
    EXPECT_EQ(g->size(), 3u);
    EXPECT_EQ(g->real_neighbors, 1u);
    EXPECT_EQ(Vector(g->features.row(0).transpose()), t);
    EXPECT_EQ(Vector(g->features.row(1).transpose()), neighbors[0]);
    EXPECT_EQ(Vector(g->features.row(2).transpose()), t);
}

TEST(BuildGraph, AdjacencyOfThreeNodes) {
    const std::vector<Vector> neighbors{Vector{{0, 1}}, Vector{{1, 1}}};
    const auto g = build_graph(Vector{{1, 0}}, neighbors, 2);
    Eigen::Matrix3d expected;
    expected << 1, 1, 1, 1, 1, 0, 1, 0, 1;
    EXPECT_EQ(Eigen::Matrix3d(g->adjacency), expected);
}

TEST(BuildGraph, DroppedWhenKIsZero) {
    EXPECT_FALSE(build_graph(Vector{{1, 0}}, {}, 0).has_value());
}

TEST(BuildGraph, RejectsBadInput) {
    const std::vector<Vector> wrong_dim{Vector{{1, 2, 3}}};
    EXPECT_THROW(build_graph(Vector{{1, 0}}, wrong_dim, 2), InvalidInput);
    const std::vector<Vector> too_many{Vector{{1, 0}}, Vector{{0, 1}}};
    EXPECT_THROW(build_graph(Vector{{1, 0}}, too_many, 1), InvalidInput);
}

TEST(NormalizeAdjacency, Examples) {
    EXPECT_DOUBLE_EQ(normalize_adjacency(star_adjacency(1))(0, 0), 1.0);
    const Eigen::MatrixXd a = normalize_adjacency(star_adjacency(3));
    EXPECT_NEAR(a(0, 0), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(a(0, 1), 1.0 / std::sqrt(6.0), 1e-15);
    EXPECT_NEAR(a(1, 0), 0.40825, 1e-5);
    EXPECT_NEAR(a(1, 1), 0.5, 1e-15);
    EXPECT_EQ(a(1, 2), 0.0);
    for (std::size_t n = 1; n <= 9; ++n) {
        const Eigen::MatrixXd h = normalize_adjacency(star_adjacency(n));
        EXPECT_TRUE(h.isApprox(h.transpose(), 0.0));
    }
}

TEST(GcnForward, IdentityLayerSingleNode) {
    GcnModel m;
    m.layers.push_back(Eigen::MatrixXd::Identity(2, 2));
    const auto g = build_graph(Vector{{1, -1}}, {}, 1);  // one padding node keeps N = 2
    const auto single = NeighborGraph{Eigen::MatrixXd(Vector{{1, -1}}.transpose()), star_adjacency(1), 0};
    EXPECT_TRUE(gcn_forward(single, m).isApprox(Vector{{1, 0}}, 1e-12));
    // The padding row copies the target, so the readout is unchanged.
    EXPECT_TRUE(gcn_forward(*g, m).isApprox(Vector{{1, 0}}, 1e-12));
}

TEST(GcnForward, ZeroInputGivesZeroOutput) {
    const auto g = build_graph(Vector::Zero(4), std::vector<Vector>{Vector::Zero(4), Vector::Zero(4)}, 4);
    const Vector out = gcn_forward(*g, small_model(1));
    EXPECT_EQ(out.size(), kGraphFeatureDim);
    EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GcnForward, MatchesDenseReferenceAndIsNonNegative) {
    std::mt19937_64 rng(8);
    for (Readout readout : {Readout::TargetNode, Readout::MeanPool}) {
        GcnModel model = small_model(2);
        model.readout = readout;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Vector> nbrs;
            const int real = static_cast<int>(rng() % 5);
            for (int i = 0; i < real; ++i) {
                nbrs.push_back(oracle::gaussian_vector(rng, 4));
            }
            const auto g = build_graph(oracle::gaussian_vector(rng, 4), nbrs, 4);
            const Vector fast = gcn_forward(*g, model);
            EXPECT_LT((fast - oracle::dense_forward(*g, model)).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_GE(fast.minCoeff(), 0.0);
        }
    }
}

TEST(GcnForward, NeighborPermutationInvariance) {
    std::mt19937_64 rng(12);
    const GcnModel model = small_model(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vector> nbrs;
        for (int i = 0; i < 4; ++i) {
            nbrs.push_back(oracle::gaussian_vector(rng, 4));
        }
        const Vector t = oracle::gaussian_vector(rng, 4);
        const Vector base = gcn_forward(*build_graph(t, nbrs, 4), model);
        std::shuffle(nbrs.begin(), nbrs.end(), rng);
        EXPECT_LT((gcn_forward(*build_graph(t, nbrs, 4), model) - base).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(GcnForward, RejectsDimensionMismatch) {
    const auto g = build_graph(Vector::Ones(3), {}, 2);
    EXPECT_THROW(gcn_forward(*g, small_model(1)), InvalidInput);
}

TEST(CosineLoss, Examples) {
    EXPECT_NEAR(cosine_loss(Vector{{1, 2}}, Vector{{1, 2}}), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(cosine_loss(Vector{{1, 0}}, Vector{{0, 1}}), 1.0);
    EXPECT_NEAR(cosine_loss(Vector{{1, 1}}, Vector{{1, 0}}), 0.29289, 1e-5);
    EXPECT_DOUBLE_EQ(cosine_loss(Vector::Zero(2), Vector{{0, 1}}), 1.0);
    EXPECT_THROW(cosine_loss(Vector{{1, 0}}, Vector::Zero(2)), InvalidInput);
}

TEST(CosineLossGrad, ZeroInputGivesZeroGradient) {
    const auto g = build_graph(Vector::Zero(4), {}, 2);
    const Vector label = Vector::Ones(kGraphFeatureDim);
    const LossGradient grad = cosine_loss_grad(*g, small_model(4), label);
    EXPECT_DOUBLE_EQ(grad.loss, 1.0);
    for (const auto& layer : grad.layers) {
        EXPECT_EQ(layer.cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(CosineLossGrad, MatchesFiniteDifferences) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const GcnModel model = init_model(std::vector<int>{6, 10, 12, kGraphFeatureDim}, 100 + trial);
        std::vector<Vector> nbrs;
        for (int i = 0; i < 3; ++i) {
            nbrs.push_back(oracle::gaussian_vector(rng, 6));
        }
        const auto g = build_graph(oracle::gaussian_vector(rng, 6), nbrs, 4);
        const Vector label = oracle::gaussian_vector(rng, kGraphFeatureDim).cwiseAbs();
        const LossGradient grad = cosine_loss_grad(*g, model, label);
        EXPECT_NEAR(grad.loss, cosine_loss(gcn_forward(*g, model), label), 1e-12);
        // Small layers entry by entry, the first 64 output columns of the last.
        for (std::size_t l = 0; l < 3; ++l) {
            for (Eigen::Index r = 0; r < model.layers[l].rows(); ++r) {
                for (Eigen::Index c = 0; c < std::min<Eigen::Index>(model.layers[l].cols(), 64); ++c) {
                    if (oracle::crosses_kink(*g, model, l, r, c, 1e-5)) {
                        continue;
                    }
                    const double numeric = oracle::numeric_gradient(*g, model, label, l, r, c, 1e-5);
                    const double analytic = grad.layers[l](r, c);
                    EXPECT_LE(std::abs(numeric - analytic), 1e-4 * std::max(1.0, std::abs(numeric)))
                        << "layer " << l << " (" << r << "," << c << ")";
                }
            }
        }
    }
}

TEST(CosineLossGrad, InactiveUnitHasZeroGradient) {
    // Column 0 of the first layer is strongly negative for a positive input, so
    // hidden unit 0 never fires and nothing upstream of it can learn.
    GcnModel model = init_model(std::vector<int>{3, 4, kGraphFeatureDim}, 6);
    model.layers[0].col(0).setConstant(-5.0);
    const auto g = build_graph(Vector{{1, 2, 3}}, std::vector<Vector>{Vector{{2, 1, 1}}}, 2);
    const Vector label = Vector::LinSpaced(kGraphFeatureDim, 0.1, 1.0);
    const LossGradient grad = cosine_loss_grad(*g, model, label);
    EXPECT_EQ(grad.layers[0].col(0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(grad.layers[1].row(0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT(grad.layers[0].cwiseAbs().maxCoeff(), 0.0);
}

TEST(InitModel, DeterministicShapesAndBounds) {
    const std::vector<int> dims{4, 8, 16, kGraphFeatureDim};
    const GcnModel a = init_model(dims, 42);
    const GcnModel b = init_model(dims, 42);
    ASSERT_EQ(a.layers.size(), 3u);
    for (std::size_t l = 0; l < 3; ++l) {
        EXPECT_EQ(a.layers[l].rows(), dims[l]);
        EXPECT_EQ(a.layers[l].cols(), dims[l + 1]);
        EXPECT_EQ(a.layers[l], b.layers[l]);
        const double bound = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
        EXPECT_LE(a.layers[l].cwiseAbs().maxCoeff(), bound);
    }
    EXPECT_NE(init_model(dims, 43).layers[0], a.layers[0]);
    EXPECT_EQ(a.dims(), dims);
}

TEST(Training, StepReducesLoss) {
    const auto samples = oracle::toy_training_set(3, 8, 4, 4);
    GcnModel model = init_model(std::vector<int>{8, 16, 16, kGraphFeatureDim}, 11);
    const double before = mean_cosine_loss(model, samples);
    for (int i = 0; i < 20; ++i) {
        gradient_descent_step(model, samples, 0.1);
    }
    EXPECT_LT(mean_cosine_loss(model, samples), before);
}
