// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "occtrack/error.hpp"

namespace occtrack {

/**
 * Rectangular cost table (rows = tracks, cols = detections). Entries are
 * nonnegative reals or kInfeasible.
 */
class CostMatrix {
public:
    static constexpr double kInfeasible = std::numeric_limits<double>::infinity();

    CostMatrix() = default;
    CostMatrix(std::size_t rows, std::size_t cols, double fill = kInfeasible)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, double value) {
        if (std::isnan(value) || value < 0.0) {
            throw InputError("cost matrix entries must be nonnegative or infeasible");
        }
        data_[r * cols_ + c] = value;
    }

    bool feasible(std::size_t r, std::size_t c) const { return std::isfinite(at(r, c)); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> matches;  ///< (row, col), ascending by row
    std::vector<std::size_t> unmatched_rows;
    std::vector<std::size_t> unmatched_cols;
};

namespace detail {

/// Lexicographically ordered pair; forms an ordered group, so potentials work.
struct TieredCost {
    double primary = 0.0;
    double secondary = 0.0;

    friend TieredCost operator+(TieredCost a, TieredCost b) {
        return {a.primary + b.primary, a.secondary + b.secondary};
    }
    friend TieredCost operator-(TieredCost a, TieredCost b) {
        return {a.primary - b.primary, a.secondary - b.secondary};
    }
    TieredCost& operator+=(TieredCost o) { return *this = *this + o; }
    TieredCost& operator-=(TieredCost o) { return *this = *this - o; }
    friend bool operator<(TieredCost a, TieredCost b) {
        return a.primary < b.primary || (a.primary == b.primary && a.secondary < b.secondary);
    }
};

/**
 * Minimum-cost perfect matching on an n x n matrix (shortest augmenting
 * paths with potentials). Returns row_of_col[j] for each column. Columns are
 * scanned in ascending order with strict comparisons, so ties resolve the
 * same way on every run.
 */
template <typename Cost, typename CostFn>
std::vector<std::size_t> hungarian(std::size_t n, CostFn&& cost, Cost infinity) {
    std::vector<Cost> u(n + 1), v(n + 1);
    std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        row_of[0] = i;
        std::size_t j0 = 0;
        std::vector<Cost> minv(n + 1, infinity);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = row_of[j0];
            Cost delta = infinity;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const Cost cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> result(n);
    for (std::size_t j = 1; j <= n; ++j) {
        result[j - 1] = row_of[j] - 1;
    }
    return result;
}

}  // namespace detail

/**
 * Optimal one-to-one matching restricted to entries <= threshold.
 *
 * With a finite threshold the matching minimizes sum(cost - threshold), the
 * cost_limit convention of lapjv: a pair is taken only when it beats leaving
 * both sides unmatched. Ties on that objective prefer more pairs. With an
 * infinite threshold the matching has maximum cardinality over feasible
 * entries and minimum total cost among those.
 */
inline Assignment solve_assignment(const CostMatrix& costs,
                                   double threshold = std::numeric_limits<double>::infinity()) {
    if (std::isnan(threshold)) {
        throw InputError("assignment threshold must not be NaN");
    }
    Assignment out;
    const std::size_t rows = costs.rows();
    const std::size_t cols = costs.cols();
    const auto usable = [&](std::size_t r, std::size_t c) {
        return costs.feasible(r, c) && costs.at(r, c) <= threshold;
    };
    const bool bounded = std::isfinite(threshold);

    using detail::TieredCost;
    const auto pair_cost = [&](std::size_t r, std::size_t c) -> TieredCost {
        return bounded ? TieredCost{costs.at(r, c) - threshold, -1.0} : TieredCost{-1.0, costs.at(r, c)};
    };

    // Unusable pairs get a primary cost larger than any achievable saving, so
    // the all-unmatched assignment always beats them.
    double big = 1.0;
    bool any = false;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (usable(r, c)) {
                big += std::abs(pair_cost(r, c).primary);
                any = true;
            }
        }
    }

    if (any) {
        // Padded to (rows + cols): dummy columns absorb unmatched rows and
        // dummy rows absorb unmatched columns, all at zero cost.
        const std::size_t n = rows + cols;
        const auto cell = [&](std::size_t r, std::size_t c) -> TieredCost {
            if (r < rows && c < cols) {
                return usable(r, c) ? pair_cost(r, c) : TieredCost{big, 0.0};
            }
            return TieredCost{};
        };
        const TieredCost infinity{std::numeric_limits<double>::infinity(), 0.0};
        const std::vector<std::size_t> row_of_col = detail::hungarian<TieredCost>(n, cell, infinity);
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t r = row_of_col[c];
            if (r < rows && usable(r, c)) {
                out.matches.emplace_back(r, c);
            }
        }
        std::sort(out.matches.begin(), out.matches.end());
    }

    std::vector<char> row_used(rows, 0), col_used(cols, 0);
    for (const auto& [r, c] : out.matches) {
        row_used[r] = 1;
        col_used[c] = 1;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        if (!row_used[r]) {
            out.unmatched_rows.push_back(r);
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (!col_used[c]) {
            out.unmatched_cols.push_back(c);
        }
    }
    return out;
}

}  // namespace occtrack
