#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace dandelion {

// Dense row-major score matrix for rectangular assignment problems.
class ScoreMatrix {
  public:
    ScoreMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

inline constexpr double kForbidden = -std::numeric_limits<double>::infinity();

// Maximum-total-score assignment of every row to a distinct column (rows <= cols),
// via shortest augmenting paths with potentials (Hungarian method), O(rows^2 cols).
// Forbidden entries (kForbidden) are used only when no feasible completion exists;
// the result first minimizes the number of forbidden pairs, then maximizes score.
std::vector<std::size_t> max_weight_assignment(const ScoreMatrix& scores);

// Total score of an assignment, kForbidden if it uses a forbidden pair.
double assignment_score(const ScoreMatrix& scores, std::span<const std::size_t> assignment);

}  // namespace dandelion
