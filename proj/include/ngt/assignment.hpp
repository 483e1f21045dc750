#pragma once

#include "ngt/core.hpp"

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ngt {

// Row-major similarity matrix (tracks x detections). Legal entries lie in [0, 1];
// gated pairs hold kForbidden.
class AffinityMatrix {
public:
    static constexpr double kForbidden = -1.0;

    AffinityMatrix() = default;
    AffinityMatrix(std::size_t rows, std::size_t cols, double fill = kForbidden);
    AffinityMatrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double at(std::size_t row, std::size_t col) const;
    bool forbidden(std::size_t row, std::size_t col) const { return at(row, col) == kForbidden; }

    // Throws InvalidInput unless value is kForbidden or a finite value in [0, 1].
    void set(std::size_t row, std::size_t col, double value);
    void forbid(std::size_t row, std::size_t col) { set(row, col, kForbidden); }

private:
    std::size_t index(std::size_t row, std::size_t col) const;

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

struct MatchPair {
    std::size_t row = 0;
    std::size_t col = 0;

    friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

// Maximum-total-similarity matching over the legal entries. Rows and columns are
// used at most once; pairs that would have to go through a forbidden entry are
// left unmatched. Result is sorted by row.
std::vector<MatchPair> solve_assignment(const AffinityMatrix& matrix);

struct FilteredMatches {
    std::vector<MatchPair> kept;
    std::vector<std::size_t> demoted_rows;
    std::vector<std::size_t> demoted_cols;
};

// Keeps (r, c) iff matrix(r, c) >= threshold.
FilteredMatches filter_matches(std::span<const MatchPair> matches, const AffinityMatrix& matrix, double threshold);

double total_similarity(std::span<const MatchPair> matches, const AffinityMatrix& matrix);

}  // namespace ngt
