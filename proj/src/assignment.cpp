#include "ngt/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ngt {

AffinityMatrix::AffinityMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, kForbidden) {
    if (fill != kForbidden) {
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                set(r, c, fill);
            }
        }
    }
}

AffinityMatrix::AffinityMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    values_.assign(rows_ * cols_, kForbidden);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw InvalidInput("ragged affinity matrix");
        }
        std::size_t c = 0;
        for (double value : row) {
            set(r, c++, value);
        }
        ++r;
    }
}

std::size_t AffinityMatrix::index(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) {
        throw InvalidInput("affinity index out of range");
    }
    return row * cols_ + col;
}

double AffinityMatrix::at(std::size_t row, std::size_t col) const { return values_[index(row, col)]; }

void AffinityMatrix::set(std::size_t row, std::size_t col, double value) {
    if (value != kForbidden && !(std::isfinite(value) && value >= 0.0 && value <= 1.0)) {
        throw InvalidInput("affinity must be FORBIDDEN or lie in [0, 1]");
    }
    values_[index(row, col)] = value;
}

namespace {

// Shortest-augmenting-path Hungarian method with potentials for an n x m
// cost matrix, n <= m. Returns the column assigned to each row.
std::vector<std::size_t> min_cost_rows(const std::vector<double>& cost, std::size_t n, std::size_t m) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based arrays; index 0 is the virtual source column.
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    auto a = [&](std::size_t i, std::size_t j) { return cost[(i - 1) * m + (j - 1)]; };

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = a(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] != 0) {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    return row_to_col;
}

}  // namespace

std::vector<MatchPair> solve_assignment(const AffinityMatrix& matrix) {
    std::vector<MatchPair> result;
    if (matrix.empty()) {
        return result;
    }
    // Forbidden entries cost the same as leaving the pair unmatched (similarity 0).
    // Since legal similarities are non-negative, the best complete assignment's legal
    // part is then a best partial matching over legal entries.
    const bool transpose = matrix.rows() > matrix.cols();
    const std::size_t n = transpose ? matrix.cols() : matrix.rows();
    const std::size_t m = transpose ? matrix.rows() : matrix.cols();
    std::vector<double> cost(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double s = transpose ? matrix.at(j, i) : matrix.at(i, j);
            cost[i * m + j] = s == AffinityMatrix::kForbidden ? 1.0 : 1.0 - s;
        }
    }

    const auto assigned = min_cost_rows(cost, n, m);
    for (std::size_t i = 0; i < n; ++i) {
        MatchPair pair = transpose ? MatchPair{assigned[i], i} : MatchPair{i, assigned[i]};
        if (!matrix.forbidden(pair.row, pair.col)) {
            result.push_back(pair);
        }
    }
    std::sort(result.begin(), result.end(), [](const MatchPair& a, const MatchPair& b) { return a.row < b.row; });
    return result;
}

FilteredMatches filter_matches(std::span<const MatchPair> matches, const AffinityMatrix& matrix, double threshold) {
    FilteredMatches out;
    for (const auto& pair : matches) {
        if (matrix.at(pair.row, pair.col) >= threshold) {
            out.kept.push_back(pair);
        } else {
            out.demoted_rows.push_back(pair.row);
            out.demoted_cols.push_back(pair.col);
        }
    }
    return out;
}

double total_similarity(std::span<const MatchPair> matches, const AffinityMatrix& matrix) {
    double total = 0.0;
    for (const auto& pair : matches) {
        total += matrix.at(pair.row, pair.col);
    }
    return total;
}

}  // namespace ngt
