#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "spatent/grid.hpp"
#include "spatent/partition.hpp"

namespace spatent {

/// Number of unordered category pairs: R = (I^2 + I) / 2.
inline std::size_t pair_category_count(std::size_t n_categories) {
  return n_categories * (n_categories + 1) / 2;
}

/// Order-independent code of the pair {i, j} in {0..R-1}, following the
/// lexicographic rank of (min, max): for I=2 the codes are
/// {0,0} -> 0, {0,1} -> 1, {1,1} -> 2.
inline std::size_t pair_code(int i, int j, std::size_t n_categories) {
  if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n_categories ||
      static_cast<std::size_t>(j) >= n_categories)
    throw std::invalid_argument("category code out of range");
  const auto a = static_cast<std::size_t>(std::min(i, j));
  const auto b = static_cast<std::size_t>(std::max(i, j));
  // pairs with first element < a occupy the first a*(2I - a + 1)/2 codes
  return a * (2 * n_categories - a + 1) / 2 + (b - a);
}

namespace detail {

/// Visits every distinct displacement offset exactly once under the
/// half-plane rule (dr > 0, or dr = 0 and dc > 0), so each unordered pixel
/// pair belongs to exactly one offset. The multiplicity
/// (nrows-dr)*(ncols-|dc|) is the number of pixel pairs sharing the offset.
template <typename F>
inline void for_each_offset(std::size_t nrows, std::size_t ncols, F&& fn) {
  for (std::size_t dc = 1; dc < ncols; ++dc)
    fn(std::size_t{0}, static_cast<std::ptrdiff_t>(dc),
       nrows * (ncols - dc));
  for (std::size_t dr = 1; dr < nrows; ++dr) {
    for (std::ptrdiff_t dc = -static_cast<std::ptrdiff_t>(ncols) + 1;
         dc < static_cast<std::ptrdiff_t>(ncols); ++dc) {
      const auto adc = static_cast<std::size_t>(dc < 0 ? -dc : dc);
      fn(dr, dc, (nrows - dr) * (ncols - adc));
    }
  }
}

}  // namespace detail

/// Ordered distance breakpoints 0 = b_0 < b_1 < ... < b_K defining the
/// half-open classes w_k = (b_{k-1}, b_k]; w_1 also contains b_0. Class
/// membership is tested with a small absolute tolerance to absorb
/// floating-point noise exactly at a boundary.
class DistanceClassSpec {
 public:
  explicit DistanceClassSpec(std::vector<double> breaks)
      : breaks_(std::move(breaks)) {
    if (breaks_.size() < 2)
      throw std::invalid_argument("need at least one distance class");
    if (breaks_.front() != 0.0)
      throw std::invalid_argument("first breakpoint must be 0");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      if (!(breaks_[i] > breaks_[i - 1]))
        throw std::invalid_argument("breakpoints must be strictly increasing");
  }

  /// The 4-nearest / 12-nearest / 5-pixel / remainder construction:
  /// breakpoints (0, s, 2s, 5s, d_max) for cell side s.
  static DistanceClassSpec fixed(double cell_side, double d_max) {
    if (!(cell_side > 0.0))
      throw std::invalid_argument("cell_side must be positive");
    if (!(d_max > 5.0 * cell_side))
      throw std::invalid_argument(
          "d_max must exceed 5 cell sides for the fixed break construction");
    return DistanceClassSpec(
        {0.0, cell_side, 2.0 * cell_side, 5.0 * cell_side, d_max});
  }

  std::size_t n_classes() const { return breaks_.size() - 1; }
  double lower(std::size_t k) const { return breaks_[k]; }
  double upper(std::size_t k) const { return breaks_[k + 1]; }
  double max_distance() const { return breaks_.back(); }
  const std::vector<double>& breaks() const { return breaks_; }

  /// 0-based class index of distance d, or n_classes() when d exceeds the
  /// last breakpoint by more than the tolerance.
  std::size_t class_of(double d, double tolerance) const {
    const auto it = std::lower_bound(breaks_.begin() + 1, breaks_.end(),
                                     d - tolerance);
    if (it == breaks_.end()) return n_classes();
    return static_cast<std::size_t>(it - breaks_.begin()) - 1;
  }

 private:
  std::vector<double> breaks_;
};

/// Nearest-rank percentiles of the distribution of ALL pairwise pixel
/// centroid distances, computed exactly from offset multiplicities (no
/// N^2 materialization, no sampling).
inline std::vector<double> pair_distance_percentiles(
    const CategoricalGrid& grid, std::span<const double> fractions) {
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] < 1.0))
      throw std::invalid_argument("fractions must lie in (0,1)");
    if (i > 0 && !(fractions[i] > fractions[i - 1]))
      throw std::invalid_argument("fractions must be strictly increasing");
  }
  std::vector<std::pair<double, std::uint64_t>> hist;  // distance, multiplicity
  detail::for_each_offset(
      grid.rows(), grid.cols(),
      [&](std::size_t dr, std::ptrdiff_t dc, std::size_t mult) {
        const double d =
            grid.cell_side() * std::hypot(static_cast<double>(dr),
                                          static_cast<double>(dc));
        hist.emplace_back(d, static_cast<std::uint64_t>(mult));
      });
  std::sort(hist.begin(), hist.end());
  std::uint64_t total = 0;
  for (const auto& [d, m] : hist) total += m;

  std::vector<double> out;
  out.reserve(fractions.size());
  for (double f : fractions) {
    const auto rank = static_cast<std::uint64_t>(
        std::ceil(f * static_cast<double>(total)));
    std::uint64_t cum = 0;
    for (const auto& [d, m] : hist) {
      cum += m;
      if (cum >= std::max<std::uint64_t>(rank, 1)) {
        out.push_back(d);
        break;
      }
    }
  }
  return out;
}

/// Breakpoints at the given percentile fractions of the pair-distance
/// distribution, closed with the exact maximum distance. Duplicate values
/// (degenerate small grids) are collapsed so the spec stays strictly
/// increasing.
inline DistanceClassSpec distance_breaks_percentile(
    const CategoricalGrid& grid, std::span<const double> fractions) {
  std::vector<double> breaks{0.0};
  for (double q : pair_distance_percentiles(grid, fractions))
    if (q > breaks.back()) breaks.push_back(q);
  const double d_max = grid.max_centroid_distance();
  if (d_max > breaks.back()) breaks.push_back(d_max);
  return DistanceClassSpec(std::move(breaks));
}

inline DistanceClassSpec distance_breaks_fixed(double cell_side, double d_max) {
  return DistanceClassSpec::fixed(cell_side, d_max);
}

/// Counts of unordered category pairs (Z) cross-classified by distance
/// class (W). Every unordered pair of distinct pixels is counted exactly
/// once: n_pairs = N(N-1)/2.
struct PairDistribution {
  std::size_t n_categories = 0;       // I
  std::size_t n_pair_categories = 0;  // R
  std::vector<double> breaks;         // the spec the counts were binned with
  std::vector<std::uint64_t> counts;  // R x K, row-major [r * K + k]
  std::vector<std::uint64_t> class_totals;  // n_{.,k}
  std::uint64_t n_pairs = 0;

  std::size_t n_classes() const { return class_totals.size(); }
  std::uint64_t at(std::size_t r, std::size_t k) const {
    return counts[r * n_classes() + k];
  }
};

/// Enumerates every unordered pixel pair once, grouped by displacement
/// offset: the distance (and therefore the class) is computed once per
/// offset and reused for all pixel pairs sharing it. Offsets may be split
/// across worker threads, each accumulating a private count matrix; counts
/// are integers, so the merged result is identical for any worker count.
inline PairDistribution enumerate_pairs(const CategoricalGrid& grid,
                                        const DistanceClassSpec& spec,
                                        unsigned n_threads = 1) {
  const std::size_t I = static_cast<std::size_t>(grid.n_categories());
  if (I < 2)
    throw std::invalid_argument(
        "pair enumeration needs at least 2 categories");
  const double tol = 1e-9 * grid.cell_side();
  const double d_max = grid.max_centroid_distance();
  if (spec.max_distance() + tol < d_max)
    throw std::invalid_argument(
        "distance classes do not cover the grid: last breakpoint " +
        std::to_string(spec.max_distance()) + " < d_max " +
        std::to_string(d_max));

  const std::size_t R = pair_category_count(I);
  const std::size_t K = spec.n_classes();

  struct Offset {
    std::size_t dr;
    std::ptrdiff_t dc;
    std::size_t klass;
  };
  std::vector<Offset> offsets;
  detail::for_each_offset(
      grid.rows(), grid.cols(),
      [&](std::size_t dr, std::ptrdiff_t dc, std::size_t) {
        const double d =
            grid.cell_side() * std::hypot(static_cast<double>(dr),
                                          static_cast<double>(dc));
        offsets.push_back({dr, dc, spec.class_of(d, tol)});
      });

  // pair-code lookup for raw value pairs
  std::vector<std::uint32_t> code(I * I);
  for (std::size_t a = 0; a < I; ++a)
    for (std::size_t b = 0; b < I; ++b)
      code[a * I + b] = static_cast<std::uint32_t>(
          pair_code(static_cast<int>(a), static_cast<int>(b), I));

  const std::size_t nrows = grid.rows();
  const std::size_t ncols = grid.cols();
  const int* values = grid.values().data();

  auto count_range = [&](std::size_t begin, std::size_t end,
                         std::vector<std::uint64_t>& local) {
    for (std::size_t o = begin; o < end; ++o) {
      const auto [dr, dc, k] = offsets[o];
      const std::size_t c_lo = dc < 0 ? static_cast<std::size_t>(-dc) : 0;
      const std::size_t c_hi = dc > 0 ? ncols - static_cast<std::size_t>(dc)
                                      : ncols;
      for (std::size_t r = 0; r + dr < nrows; ++r) {
        const int* row_a = values + r * ncols;
        const int* row_b = values + (r + dr) * ncols + dc;
        for (std::size_t c = c_lo; c < c_hi; ++c)
          ++local[code[static_cast<std::size_t>(row_a[c]) * I +
                       static_cast<std::size_t>(row_b[c])] *
                      K +
                  k];
      }
    }
  };

  PairDistribution pd;
  pd.n_categories = I;
  pd.n_pair_categories = R;
  pd.breaks = spec.breaks();
  pd.counts.assign(R * K, 0);

  if (n_threads == 0) n_threads = std::thread::hardware_concurrency();
  n_threads = std::max<unsigned>(
      1, std::min<unsigned>(n_threads,
                            static_cast<unsigned>(offsets.size())));
  if (n_threads <= 1) {
    count_range(0, offsets.size(), pd.counts);
  } else {
    std::vector<std::vector<std::uint64_t>> partial(
        n_threads, std::vector<std::uint64_t>(R * K, 0));
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    const std::size_t chunk = (offsets.size() + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      const std::size_t begin = std::min(offsets.size(), t * chunk);
      const std::size_t end = std::min(offsets.size(), begin + chunk);
      workers.emplace_back(
          [&, begin, end, t]() { count_range(begin, end, partial[t]); });
    }
    for (auto& w : workers) w.join();
    for (const auto& local : partial)
      for (std::size_t i = 0; i < pd.counts.size(); ++i)
        pd.counts[i] += local[i];
  }

  pd.class_totals.assign(K, 0);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t k = 0; k < K; ++k)
      pd.class_totals[k] += pd.counts[r * K + k];
  for (auto t : pd.class_totals) pd.n_pairs += t;
  return pd;
}

/// One distance class of the decomposition: its weight p(w_k), partial
/// information PI(Z|w_k) and partial residual entropy H(Z|w_k). Classes with
/// no pairs are flagged and contribute zero.
struct DistanceClassTerm {
  double lower = 0.0;
  double upper = 0.0;
  double weight = 0.0;
  double partial_information = 0.0;
  double partial_residual = 0.0;
  bool empty = false;
};

/// H(Z) = MI(Z,W) + H(Z)_W with per-class partial terms; the identity holds
/// by construction since all three sides come from the same count matrix.
struct EntropyDecomposition {
  double h_z = 0.0;
  double mutual_information = 0.0;
  double residual = 0.0;
  std::vector<double> pair_marginal;  // p(z_r)
  std::vector<DistanceClassTerm> classes;
};

inline EntropyDecomposition entropy_decomposition(const PairDistribution& pd) {
  if (pd.n_pairs == 0)
    throw std::invalid_argument("empty pair distribution");
  const std::size_t R = pd.n_pair_categories;
  const std::size_t K = pd.n_classes();
  const double n = static_cast<double>(pd.n_pairs);

  EntropyDecomposition dec;
  dec.pair_marginal.resize(R);
  std::vector<std::uint64_t> row_totals(R, 0);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < K; ++k) row_totals[r] += pd.at(r, k);
    dec.pair_marginal[r] = static_cast<double>(row_totals[r]) / n;
    if (dec.pair_marginal[r] > 0.0)
      dec.h_z -= dec.pair_marginal[r] * std::log(dec.pair_marginal[r]);
  }

  dec.classes.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    auto& cls = dec.classes[k];
    cls.lower = pd.breaks[k];
    cls.upper = pd.breaks[k + 1];
    const double nk = static_cast<double>(pd.class_totals[k]);
    cls.weight = nk / n;
    if (pd.class_totals[k] == 0) {
      cls.empty = true;
      continue;
    }
    for (std::size_t r = 0; r < R; ++r) {
      const auto c = pd.at(r, k);
      if (c == 0) continue;
      const double p_cond = static_cast<double>(c) / nk;
      cls.partial_information +=
          p_cond * std::log(p_cond / dec.pair_marginal[r]);
      cls.partial_residual -= p_cond * std::log(p_cond);
    }
    dec.mutual_information += cls.weight * cls.partial_information;
    dec.residual += cls.weight * cls.partial_residual;
  }
  return dec;
}

/// Per-class (PI, H) rescaled so their sum is 1; undefined (flagged) when
/// PI + H = 0 for the class.
struct ProportionalTerm {
  double information = 0.0;
  double residual = 0.0;
  bool defined = false;
};

inline std::vector<ProportionalTerm> proportional_terms(
    const EntropyDecomposition& dec) {
  std::vector<ProportionalTerm> out(dec.classes.size());
  for (std::size_t k = 0; k < dec.classes.size(); ++k) {
    const auto& cls = dec.classes[k];
    const double total = cls.partial_information + cls.partial_residual;
    if (!cls.empty && total > 0.0) {
      out[k].information = cls.partial_information / total;
      out[k].residual = cls.partial_residual / total;
      out[k].defined = true;
    }
  }
  return out;
}

}  // namespace spatent
