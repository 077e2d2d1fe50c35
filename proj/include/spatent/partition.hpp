#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spatent/grid.hpp"
#include "spatent/rng.hpp"

namespace spatent {

/// Assignment of grid cells to G sub-areas. Empty areas are dropped during
/// construction and indices compacted, so every area holds at least one cell
/// and the sizes sum to the window size T exactly.
struct AreaPartition {
  std::size_t nrows = 0;
  std::size_t ncols = 0;
  double cell_side = 0.0;
  std::vector<int> labels;                    // per cell, row-major, 0..G-1
  std::size_t n_areas = 0;                    // G
  std::vector<std::size_t> area_cell_counts;  // cells per area
  std::vector<double> area_sizes;             // T_g = cells * cell_side^2
  std::vector<Coordinate> area_centroids;     // mean of member-cell centroids
  double total_size = 0.0;                    // T

  bool aligned_with(const CategoricalGrid& grid) const {
    return nrows == grid.rows() && ncols == grid.cols();
  }
};

/// Builds an AreaPartition from raw per-cell labels: drops empty label values,
/// compacts indices (preserving relative label order) and computes sizes and
/// centroids. This is also the entry point for externally supplied label maps.
inline AreaPartition partition_from_labels(const CategoricalGrid& grid,
                                           std::span<const int> raw_labels) {
  if (raw_labels.size() != grid.n_cells())
    throw std::invalid_argument(
        "label map size " + std::to_string(raw_labels.size()) +
        " does not match grid with " + std::to_string(grid.n_cells()) +
        " cells");
  int max_label = -1;
  for (int v : raw_labels) {
    if (v < 0) throw std::invalid_argument("labels must be non-negative");
    max_label = std::max(max_label, v);
  }

  // compact: non-empty labels keep their relative order
  std::vector<std::size_t> counts(static_cast<std::size_t>(max_label) + 1, 0);
  for (int v : raw_labels) ++counts[static_cast<std::size_t>(v)];
  std::vector<int> remap(counts.size(), -1);
  int next = 0;
  for (std::size_t g = 0; g < counts.size(); ++g)
    if (counts[g] > 0) remap[g] = next++;

  AreaPartition part;
  part.nrows = grid.rows();
  part.ncols = grid.cols();
  part.cell_side = grid.cell_side();
  part.n_areas = static_cast<std::size_t>(next);
  part.labels.resize(raw_labels.size());
  part.area_cell_counts.assign(part.n_areas, 0);
  std::vector<double> sum_x(part.n_areas, 0.0), sum_y(part.n_areas, 0.0);
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const std::size_t idx = r * grid.cols() + c;
      const int g = remap[static_cast<std::size_t>(raw_labels[idx])];
      part.labels[idx] = g;
      ++part.area_cell_counts[static_cast<std::size_t>(g)];
      const Coordinate cen = grid.centroid(r, c);
      sum_x[static_cast<std::size_t>(g)] += cen.x;
      sum_y[static_cast<std::size_t>(g)] += cen.y;
    }
  }
  part.area_sizes.resize(part.n_areas);
  part.area_centroids.resize(part.n_areas);
  const double cell_area = grid.cell_side() * grid.cell_side();
  for (std::size_t g = 0; g < part.n_areas; ++g) {
    const double n = static_cast<double>(part.area_cell_counts[g]);
    part.area_sizes[g] = n * cell_area;
    part.area_centroids[g] = {sum_x[g] / n, sum_y[g] / n};
  }
  part.total_size = grid.total_size();
  return part;
}

/// Dirichlet tessellation against explicit generating sites: each cell joins
/// the site nearest to its centroid, ties broken by the lowest site index.
inline AreaPartition voronoi_partition_at(const CategoricalGrid& grid,
                                          std::span<const Coordinate> sites) {
  if (sites.size() < 2)
    throw std::invalid_argument("voronoi partition needs at least 2 centroids");
  std::vector<int> labels(grid.n_cells());
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const Coordinate cen = grid.centroid(r, c);
      int best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < sites.size(); ++s) {
        const double dx = cen.x - sites[s].x;
        const double dy = cen.y - sites[s].y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
          best_d2 = d2;
          best = static_cast<int>(s);
        }
      }
      labels[r * grid.cols() + c] = best;
    }
  }
  return partition_from_labels(grid, labels);
}

/// Dirichlet tessellation from n_centroids sites drawn uniformly over the
/// window. Deterministic given the stream; empty cells compact away, so the
/// resulting area count can be below n_centroids.
inline AreaPartition voronoi_partition(const CategoricalGrid& grid,
                                       std::size_t n_centroids, Rng& rng) {
  if (n_centroids < 2)
    throw std::invalid_argument("voronoi partition needs at least 2 centroids");
  std::vector<Coordinate> sites(n_centroids);
  for (auto& s : sites) {
    s.x = grid.origin().x + rng.uniform() * grid.window_width();
    s.y = grid.origin().y + rng.uniform() * grid.window_height();
  }
  return voronoi_partition_at(grid, sites);
}

/// Concentric equal-width rings around the window centroid. Ring width is
/// max(cell centroid distance)/n_rings so the outermost ring always owns the
/// window corners; a cell with centroid distance d joins ring ceil(d/width),
/// with d = 0 in ring 1.
inline AreaPartition annuli_partition(const CategoricalGrid& grid,
                                      std::size_t n_rings) {
  if (n_rings < 2)
    throw std::invalid_argument("annuli partition needs at least 2 rings");
  const Coordinate center{grid.origin().x + grid.window_width() / 2.0,
                          grid.origin().y + grid.window_height() / 2.0};
  std::vector<double> dist(grid.n_cells());
  double max_d = 0.0;
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const double d = distance(grid.centroid(r, c), center);
      dist[r * grid.cols() + c] = d;
      max_d = std::max(max_d, d);
    }
  }
  if (max_d == 0.0)
    throw std::invalid_argument("annuli partition undefined for a 1x1 grid");
  const double width = max_d / static_cast<double>(n_rings);
  std::vector<int> labels(grid.n_cells());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    std::size_t ring =
        (dist[i] <= 0.0)
            ? 1
            : static_cast<std::size_t>(std::ceil(dist[i] / width));
    ring = std::min(ring, n_rings);  // absorb fp round-up at the rim
    labels[i] = static_cast<int>(ring - 1);
  }
  return partition_from_labels(grid, labels);
}

/// Nearest-rank empirical percentile: the value with 1-based rank
/// ceil(f * n) in the sorted sample.
inline double nearest_rank(std::span<const double> sorted_values, double f) {
  if (sorted_values.empty())
    throw std::invalid_argument("percentile of an empty sample");
  const auto n = static_cast<double>(sorted_values.size());
  auto rank = static_cast<std::size_t>(std::ceil(f * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted_values.size());
  return sorted_values[rank - 1];
}

/// Percentiles of the G(G-1)/2 pairwise area-centroid distances.
inline std::vector<double> centroid_distance_percentiles(
    const AreaPartition& partition, std::span<const double> fractions) {
  if (partition.n_areas < 2)
    throw std::invalid_argument(
        "centroid distance percentiles need at least 2 areas");
  for (double f : fractions)
    if (!(f > 0.0 && f < 1.0))
      throw std::invalid_argument("percentile fractions must lie in (0,1)");
  std::vector<double> dists;
  dists.reserve(partition.n_areas * (partition.n_areas - 1) / 2);
  for (std::size_t g = 0; g < partition.n_areas; ++g)
    for (std::size_t h = g + 1; h < partition.n_areas; ++h)
      dists.push_back(
          distance(partition.area_centroids[g], partition.area_centroids[h]));
  std::sort(dists.begin(), dists.end());
  std::vector<double> out;
  out.reserve(fractions.size());
  for (double f : fractions) out.push_back(nearest_rank(dists, f));
  return out;
}

}  // namespace spatent
