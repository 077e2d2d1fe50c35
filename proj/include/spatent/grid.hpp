#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spatent {

struct Coordinate {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Coordinate a, Coordinate b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Rectangular lattice of category codes with square-cell geometry.
///
/// Storage is row-major with row 0 at the BOTTOM of the window, so cell
/// centroids follow ordinary Cartesian axes (y grows with the row index).
/// Codes are dense in {0..n_categories-1}; n_categories may exceed the
/// number of codes actually present (e.g. an all-zero binary grid).
/// Instances are immutable after construction and safe to read concurrently.
class CategoricalGrid {
 public:
  CategoricalGrid(std::size_t nrows, std::size_t ncols, double cell_side,
                  Coordinate origin, std::vector<int> values, int n_categories)
      : nrows_(nrows),
        ncols_(ncols),
        cell_side_(cell_side),
        origin_(origin),
        values_(std::move(values)),
        n_categories_(n_categories) {
    if (nrows_ == 0 || ncols_ == 0)
      throw std::invalid_argument("grid dimensions must be positive");
    if (!(cell_side_ > 0.0) || !std::isfinite(cell_side_))
      throw std::invalid_argument("cell_side must be positive and finite");
    if (!std::isfinite(origin_.x) || !std::isfinite(origin_.y))
      throw std::invalid_argument("grid origin must be finite");
    if (values_.size() != nrows_ * ncols_)
      throw std::invalid_argument("grid values size " +
                                  std::to_string(values_.size()) +
                                  " does not match " + std::to_string(nrows_) +
                                  "x" + std::to_string(ncols_));
    if (n_categories_ < 1)
      throw std::invalid_argument("n_categories must be at least 1");
    for (int v : values_) {
      if (v < 0 || v >= n_categories_)
        throw std::invalid_argument("cell code " + std::to_string(v) +
                                    " outside 0.." +
                                    std::to_string(n_categories_ - 1));
    }
  }

  /// Convenience constructor inferring n_categories as max(code)+1.
  static CategoricalGrid from_values(std::size_t nrows, std::size_t ncols,
                                     double cell_side, Coordinate origin,
                                     std::vector<int> values) {
    int n_cat = 1;
    for (int v : values) n_cat = std::max(n_cat, v + 1);
    return CategoricalGrid(nrows, ncols, cell_side, origin, std::move(values),
                           n_cat);
  }

  std::size_t rows() const { return nrows_; }
  std::size_t cols() const { return ncols_; }
  std::size_t n_cells() const { return nrows_ * ncols_; }
  double cell_side() const { return cell_side_; }
  Coordinate origin() const { return origin_; }
  int n_categories() const { return n_categories_; }
  const std::vector<int>& values() const { return values_; }

  int at(std::size_t row, std::size_t col) const {
    check_index(row, col);
    return values_[row * ncols_ + col];
  }

  double window_width() const { return static_cast<double>(ncols_) * cell_side_; }
  double window_height() const { return static_cast<double>(nrows_) * cell_side_; }

  /// Total window size T = nrows * ncols * cell_side^2.
  double total_size() const {
    return static_cast<double>(nrows_) * static_cast<double>(ncols_) *
           cell_side_ * cell_side_;
  }

  /// Centroid of the cell at (row, col); rows count from the bottom.
  Coordinate centroid(std::size_t row, std::size_t col) const {
    check_index(row, col);
    return {origin_.x + (static_cast<double>(col) + 0.5) * cell_side_,
            origin_.y + (static_cast<double>(row) + 0.5) * cell_side_};
  }

  /// Largest pixel-centroid distance in the window (corner to corner).
  double max_centroid_distance() const {
    return cell_side_ * std::hypot(static_cast<double>(nrows_ - 1),
                                   static_cast<double>(ncols_ - 1));
  }

  std::vector<std::size_t> category_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_categories_), 0);
    for (int v : values_) ++counts[static_cast<std::size_t>(v)];
    return counts;
  }

  /// p(x_i) = count(code i) / n_cells; sums to 1.
  std::vector<double> category_proportions() const {
    const auto counts = category_counts();
    std::vector<double> p(counts.size());
    const double n = static_cast<double>(n_cells());
    for (std::size_t i = 0; i < counts.size(); ++i)
      p[i] = static_cast<double>(counts[i]) / n;
    return p;
  }

 private:
  void check_index(std::size_t row, std::size_t col) const {
    if (row >= nrows_ || col >= ncols_)
      throw std::out_of_range("cell index (" + std::to_string(row) + "," +
                              std::to_string(col) + ") out of range for " +
                              std::to_string(nrows_) + "x" +
                              std::to_string(ncols_) + " grid");
  }

  std::size_t nrows_;
  std::size_t ncols_;
  double cell_side_;
  Coordinate origin_;
  std::vector<int> values_;
  int n_categories_;
};

}  // namespace spatent
