#include "ngt/assignment.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ngt;

namespace {

std::vector<MatchPair> pairs(std::initializer_list<std::pair<std::size_t, std::size_t>> list) {
    std::vector<MatchPair> out;
    for (auto [r, c] : list) {
        out.push_back({r, c});
    }
    return out;
}

}  // namespace

TEST(SolveAssignment, SingleEntry) {
    const AffinityMatrix m{{0.9}};
    EXPECT_EQ(solve_assignment(m), pairs({{0, 0}}));
}

TEST(SolveAssignment, SquareExample) {
    const AffinityMatrix m{{0.9, 0.2}, {0.3, 0.8}};
    const auto result = solve_assignment(m);
    EXPECT_EQ(result, pairs({{0, 0}, {1, 1}}));
    EXPECT_NEAR(total_similarity(result, m), 1.7, 1e-12);
}

TEST(SolveAssignment, RectangularExample) {
    const AffinityMatrix m{{0.1, 0.9, 0.5}, {0.8, 0.7, 0.2}};
    const auto result = solve_assignment(m);
    EXPECT_EQ(result, pairs({{0, 1}, {1, 0}}));
    EXPECT_NEAR(total_similarity(result, m), 1.7, 1e-12);
}

TEST(SolveAssignment, TallMatrixTransposes) {
    const AffinityMatrix m{{0.1, 0.8}, {0.9, 0.7}, {0.5, 0.2}};
    const auto result = solve_assignment(m);
    EXPECT_EQ(result, pairs({{0, 1}, {1, 0}}));
}

TEST(SolveAssignment, EmptyMatrices) {
    EXPECT_TRUE(solve_assignment(AffinityMatrix{}).empty());
    EXPECT_TRUE(solve_assignment(AffinityMatrix(0, 4)).empty());
    EXPECT_TRUE(solve_assignment(AffinityMatrix(3, 0)).empty());
}

TEST(SolveAssignment, ForbiddenRowIsUnmatched) {
    AffinityMatrix m{{0.9, 0.4}, {0.0, 0.0}};
    m.forbid(1, 0);
    m.forbid(1, 1);
    EXPECT_EQ(solve_assignment(m), pairs({{0, 0}}));
}

TEST(SolveAssignment, ForbiddenNeverSelected) {
    AffinityMatrix m(2, 2);
    m.set(0, 0, 0.1);
    m.set(1, 1, 0.2);
    EXPECT_EQ(solve_assignment(m), pairs({{0, 0}, {1, 1}}));
}

// A forbidden entry priced at -1 would steer the solver away from the best
// partial matching here: A-X (1.0) alone beats A-Y + B-X (0.5).
TEST(SolveAssignment, ForbiddenDoesNotPenalizeOptimalPartialMatching) {
    AffinityMatrix m{{1.0, 0.0}, {0.5, 0.0}};
    m.forbid(1, 1);
    const auto result = solve_assignment(m);
    EXPECT_NEAR(total_similarity(result, m), 1.0, 1e-12);
    for (const auto& p : result) {
        EXPECT_FALSE(m.forbidden(p.row, p.col));
    }
}

TEST(SolveAssignment, MatchesBruteForceOnRandomMatrices) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> size(1, 6);
    for (int trial = 0; trial < 300; ++trial) {
        const auto m = oracle::random_matrix(rng, size(rng), size(rng), trial % 3 == 0 ? 0.3 : 0.0);
        const auto result = solve_assignment(m);
        EXPECT_NEAR(total_similarity(result, m), oracle::brute_force_best(m), 1e-12);
        std::vector<char> rows(m.rows(), 0), cols(m.cols(), 0);
        for (const auto& p : result) {
            EXPECT_FALSE(m.forbidden(p.row, p.col));
            EXPECT_FALSE(rows[p.row]++);
            EXPECT_FALSE(cols[p.col]++);
        }
    }
}

TEST(SolveAssignment, FullSizeWithoutForbiddenEntries) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> size(1, 7);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = oracle::random_matrix(rng, size(rng), size(rng));
        EXPECT_EQ(solve_assignment(m).size(), std::min(m.rows(), m.cols()));
    }
}

TEST(SolveAssignment, RowPermutationPermutesSolution) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = oracle::random_matrix(rng, 5, 6);
        std::vector<std::size_t> perm{3, 0, 4, 1, 2};
        AffinityMatrix p(5, 6);
        for (std::size_t r = 0; r < 5; ++r) {
            for (std::size_t c = 0; c < 6; ++c) {
                p.set(r, c, m.at(perm[r], c));
            }
        }
        const double original = total_similarity(solve_assignment(m), m);
        const double permuted = total_similarity(solve_assignment(p), p);
        EXPECT_NEAR(original, permuted, 1e-12);
    }
}

TEST(AffinityMatrix, RejectsOutOfRangeValues) {
    AffinityMatrix m(1, 1);
    EXPECT_THROW(m.set(0, 0, 1.5), InvalidInput);
    EXPECT_THROW(m.set(0, 0, -0.5), InvalidInput);
    EXPECT_THROW(m.set(0, 0, NAN), InvalidInput);
    EXPECT_THROW(m.at(1, 0), InvalidInput);
    EXPECT_NO_THROW(m.set(0, 0, 1.0));
}

TEST(FilterMatches, Examples) {
    const AffinityMatrix high{{0.9}};
    auto f = filter_matches(pairs({{0, 0}}), high, 0.85);
    EXPECT_EQ(f.kept, pairs({{0, 0}}));
    EXPECT_TRUE(f.demoted_rows.empty());

    const AffinityMatrix low{{0.84}};
    f = filter_matches(pairs({{0, 0}}), low, 0.85);
    EXPECT_TRUE(f.kept.empty());
    EXPECT_EQ(f.demoted_rows, std::vector<std::size_t>{0});
    EXPECT_EQ(f.demoted_cols, std::vector<std::size_t>{0});

    const AffinityMatrix m{{0.0, 0.3}, {0.1, 0.2}};
    f = filter_matches(pairs({{0, 0}, {1, 1}}), m, 0.0);
    EXPECT_EQ(f.kept.size(), 2u);
}

TEST(FilterMatches, ThresholdIsInclusive) {
    const AffinityMatrix m{{0.85}};
    EXPECT_EQ(filter_matches(pairs({{0, 0}}), m, 0.85).kept.size(), 1u);
}
