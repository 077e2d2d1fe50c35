#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spatent/grid.hpp"
#include "spatent/partition.hpp"

namespace spatent {

/// Shannon entropy sum p_i log(1/p_i) in natural-log units, with the
/// 0*log(1/0) = 0 convention. Entries must be non-negative and sum to 1
/// within 1e-9.
inline double shannon_entropy(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0)
      throw std::invalid_argument("probabilities must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("probabilities must sum to 1, got " +
                                std::to_string(sum));
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

namespace detail {

/// p_g = focal cells in area g / total focal cells. Throws when the focal
/// category is out of range, the grid is not binary-capable (I < 2), the
/// partition misaligns, or no focal cell exists.
inline std::vector<double> focal_occurrence(const CategoricalGrid& grid,
                                            const AreaPartition& partition,
                                            int focal) {
  if (grid.n_categories() < 2)
    throw std::invalid_argument(
        "spatial entropy needs at least 2 categories, grid has " +
        std::to_string(grid.n_categories()));
  if (focal < 0 || focal >= grid.n_categories())
    throw std::invalid_argument("focal category " + std::to_string(focal) +
                                " outside 0.." +
                                std::to_string(grid.n_categories() - 1));
  if (!partition.aligned_with(grid))
    throw std::invalid_argument("partition is not aligned with the grid");
  std::vector<std::size_t> counts(partition.n_areas, 0);
  std::size_t total = 0;
  const auto& values = grid.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == focal) {
      ++counts[static_cast<std::size_t>(partition.labels[i])];
      ++total;
    }
  }
  if (total == 0)
    throw std::invalid_argument("focal category " + std::to_string(focal) +
                                " has no cells; the measure is undefined");
  std::vector<double> p(partition.n_areas);
  for (std::size_t g = 0; g < p.size(); ++g)
    p[g] = static_cast<double>(counts[g]) / static_cast<double>(total);
  return p;
}

}  // namespace detail

/// Spatial entropy over an unequal area partition:
/// global = sum_g p_g log(T_g / p_g), bounded by [log T_g*, log T].
struct BattyResult {
  double global = 0.0;
  double relative = 0.0;     // global / log(T)
  double lower_bound = 0.0;  // log(T_g*), g* = smallest area
  double upper_bound = 0.0;  // log(T)
  std::vector<double> occurrence;  // p_g, sums to 1
  std::vector<double> sizes;       // T_g
  std::vector<double> intensity;   // lambda_g = p_g / T_g
  std::vector<double> local;       // p_g log(T_g / p_g)
};

inline BattyResult batty_entropy(const CategoricalGrid& grid,
                                 const AreaPartition& partition, int focal) {
  BattyResult res;
  res.occurrence = detail::focal_occurrence(grid, partition, focal);
  res.sizes = partition.area_sizes;
  res.intensity.resize(partition.n_areas);
  res.local.resize(partition.n_areas);
  double smallest = partition.area_sizes[0];
  for (std::size_t g = 0; g < partition.n_areas; ++g) {
    const double pg = res.occurrence[g];
    const double tg = partition.area_sizes[g];
    smallest = std::min(smallest, tg);
    res.intensity[g] = pg / tg;
    res.local[g] = (pg > 0.0) ? pg * std::log(tg / pg) : 0.0;
    res.global += res.local[g];
  }
  res.lower_bound = std::log(smallest);
  res.upper_bound = std::log(partition.total_size);
  res.relative = res.global / res.upper_bound;
  return res;
}

/// Symmetric G x G neighbourhood matrix with a fixed all-ones diagonal
/// (every area neighbours itself).
struct Adjacency {
  std::size_t size = 0;
  std::vector<std::uint8_t> flat;  // size*size, row-major

  bool at(std::size_t g, std::size_t h) const { return flat[g * size + h] != 0; }
};

/// Neighbourhood by centroid distance: a_gh = 1 iff the area centroids lie
/// within `neighbourhood_distance` of each other (diagonal always 1).
inline Adjacency area_adjacency(const AreaPartition& partition,
                                double neighbourhood_distance) {
  if (neighbourhood_distance < 0.0)
    throw std::invalid_argument("neighbourhood distance must be >= 0");
  Adjacency adj;
  adj.size = partition.n_areas;
  adj.flat.assign(adj.size * adj.size, 0);
  for (std::size_t g = 0; g < adj.size; ++g) {
    adj.flat[g * adj.size + g] = 1;
    for (std::size_t h = g + 1; h < adj.size; ++h) {
      const double d =
          distance(partition.area_centroids[g], partition.area_centroids[h]);
      if (d <= neighbourhood_distance) {
        adj.flat[g * adj.size + h] = 1;
        adj.flat[h * adj.size + g] = 1;
      }
    }
  }
  return adj;
}

/// Neighbourhood for ordered ring partitions: areas within `steps` ring
/// indices of each other are neighbours ("up to the j-th farthest annulus").
inline Adjacency ring_adjacency(std::size_t n_areas, std::size_t steps) {
  Adjacency adj;
  adj.size = n_areas;
  adj.flat.assign(n_areas * n_areas, 0);
  for (std::size_t g = 0; g < n_areas; ++g)
    for (std::size_t h = 0; h < n_areas; ++h)
      if ((g >= h ? g - h : h - g) <= steps) adj.flat[g * n_areas + h] = 1;
  return adj;
}

/// How neighbouring probabilities are pooled into p~_g: `average` divides by
/// the neighbourhood size (the computation used alongside the partitions
/// here); `sum` keeps the plain sum of the original formulation, which can
/// push p~ past 1.
enum class KcSmoothing { average, sum };

/// LISA-style entropy with neighbourhood-smoothed occurrence probabilities:
/// global = sum_g p_g log(1 / p~_g); the local terms add up to the global.
struct KCResult {
  double global = 0.0;
  double relative = 0.0;  // global / log(G)
  std::vector<double> occurrence;  // p_g
  std::vector<double> smoothed;    // p~_g
  std::vector<double> local;       // p_g log(1 / p~_g)
};

inline KCResult kc_entropy(const CategoricalGrid& grid,
                           const AreaPartition& partition, int focal,
                           const Adjacency& adjacency,
                           KcSmoothing smoothing = KcSmoothing::average) {
  if (adjacency.size != partition.n_areas)
    throw std::invalid_argument("adjacency size does not match the partition");
  KCResult res;
  res.occurrence = detail::focal_occurrence(grid, partition, focal);
  const std::size_t n = partition.n_areas;
  res.smoothed.resize(n);
  res.local.resize(n);
  for (std::size_t g = 0; g < n; ++g) {
    double acc = 0.0;
    double degree = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
      if (adjacency.at(g, h)) {
        acc += res.occurrence[h];
        degree += 1.0;
      }
    }
    res.smoothed[g] = (smoothing == KcSmoothing::average) ? acc / degree : acc;
    const double pg = res.occurrence[g];
    // p~_g = 0 only when p_g = 0 (self-inclusion), so the term is 0
    res.local[g] = (pg > 0.0) ? pg * std::log(1.0 / res.smoothed[g]) : 0.0;
    res.global += res.local[g];
  }
  // single-area partition: global is exactly 0, report relative as 0 too
  res.relative = (n > 1) ? res.global / std::log(static_cast<double>(n)) : 0.0;
  return res;
}

inline KCResult kc_entropy(const CategoricalGrid& grid,
                           const AreaPartition& partition, int focal,
                           double neighbourhood_distance,
                           KcSmoothing smoothing = KcSmoothing::average) {
  return kc_entropy(grid, partition, focal,
                    area_adjacency(partition, neighbourhood_distance),
                    smoothing);
}

}  // namespace spatent
