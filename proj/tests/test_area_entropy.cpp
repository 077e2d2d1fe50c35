#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spatent/area_entropy.hpp"
#include "spatent/grid.hpp"
#include "spatent/partition.hpp"
#include "spatent/rng.hpp"

using namespace spatent;
using Catch::Approx;

namespace {

CategoricalGrid binary_grid(std::size_t nrows, std::size_t ncols,
                            double cell_side, std::vector<int> values) {
  return CategoricalGrid(nrows, ncols, cell_side, {0.0, 0.0},
                         std::move(values), 2);
}

}  // namespace

TEST_CASE("shannon entropy on reference distributions") {
  const double half[] = {0.5, 0.5};
  CHECK(shannon_entropy(half) == Approx(0.693147).margin(1e-6));
  const double degenerate[] = {1.0, 0.0};
  CHECK(shannon_entropy(degenerate) == 0.0);
  const double quarter[] = {0.25, 0.25, 0.25, 0.25};
  CHECK(shannon_entropy(quarter) == Approx(1.386294).margin(1e-6));

  const double negative[] = {-0.1, 1.1};
  CHECK_THROWS_AS(shannon_entropy(negative), std::invalid_argument);
  const double off[] = {0.5, 0.4};
  CHECK_THROWS_AS(shannon_entropy(off), std::invalid_argument);
}

TEST_CASE("batty entropy reaches log T_g* when mass sits on the smallest area") {
  // 10x10, side 1, T = 100; area 0 is a 2x2 block (size 4), the rest area 1
  std::vector<int> labels(100, 1);
  std::vector<int> values(100, 0);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) {
      labels[r * 10 + c] = 0;
      values[r * 10 + c] = 1;
    }
  const auto grid = binary_grid(10, 10, 1.0, values);
  const auto part = partition_from_labels(grid, labels);
  REQUIRE(part.area_sizes[0] == 4.0);
  const auto res = batty_entropy(grid, part, 1);
  CHECK(res.global == Approx(1.386294).margin(1e-6));
  CHECK(res.global == res.lower_bound);  // exactly log(T_g*)
}

TEST_CASE("batty entropy reaches log T under uniform intensity") {
  // 10 column strips of size 10; 2 focal cells per strip gives p_g = T_g/T
  std::vector<int> labels(100), values(100, 0);
  for (std::size_t r = 0; r < 10; ++r)
    for (std::size_t c = 0; c < 10; ++c) {
      labels[r * 10 + c] = static_cast<int>(c);
      if (r < 2) values[r * 10 + c] = 1;
    }
  const auto grid = binary_grid(10, 10, 1.0, values);
  const auto part = partition_from_labels(grid, labels);
  const auto res = batty_entropy(grid, part, 1);
  CHECK(std::abs(res.global - std::log(100.0)) < 1e-9);
  CHECK(res.relative == Approx(1.0));
  CHECK(res.global == res.upper_bound);
}

TEST_CASE("batty entropy hand value for two unequal areas") {
  // T = (4, 6), p = (0.5, 0.5): 0.5 log 8 + 0.5 log 12
  std::vector<int> labels(10), values(10, 0);
  for (std::size_t i = 0; i < 10; ++i) labels[i] = i < 4 ? 0 : 1;
  values[0] = 1;  // one focal cell in each area
  values[5] = 1;
  const auto grid = binary_grid(1, 10, 1.0, values);
  const auto part = partition_from_labels(grid, labels);
  const auto res = batty_entropy(grid, part, 1);
  CHECK(res.global == Approx(2.282174).margin(1e-6));
  CHECK(res.local[0] == Approx(0.5 * std::log(8.0)));
  CHECK(res.local[1] == Approx(0.5 * std::log(12.0)));
}

TEST_CASE("batty entropy with unit areas is Shannon's entropy over areas") {
  // every cell its own area, cell side 1
  std::vector<int> labels(6), values{1, 1, 0, 1, 0, 1};
  std::iota(labels.begin(), labels.end(), 0);
  const auto grid = binary_grid(2, 3, 1.0, values);
  const auto part = partition_from_labels(grid, labels);
  const auto res = batty_entropy(grid, part, 1);
  CHECK(std::abs(shannon_entropy(res.occurrence) - res.global) < 1e-15);
}

TEST_CASE("batty entropy rejects a focal category with no cells") {
  const auto grid = binary_grid(2, 2, 1.0, {0, 0, 0, 0});
  const int labels[] = {0, 0, 1, 1};
  const auto part = partition_from_labels(grid, labels);
  CHECK_THROWS_AS(batty_entropy(grid, part, 1), std::invalid_argument);
  CHECK_THROWS_AS(batty_entropy(grid, part, 7), std::invalid_argument);
}

TEST_CASE("batty entropy stays within its analytic bounds on random inputs") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t nrows = 2 + rng.index(12);
    const std::size_t ncols = 2 + rng.index(12);
    std::vector<int> values(nrows * ncols), labels(nrows * ncols);
    bool any_focal = false;
    const std::uint64_t n_areas = 1 + rng.index(6);
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = static_cast<int>(rng.index(2));
      any_focal |= values[i] == 1;
      labels[i] = static_cast<int>(rng.index(n_areas));
    }
    if (!any_focal) values[0] = 1;
    const auto grid = binary_grid(nrows, ncols, 0.1 + rng.uniform(), values);
    const auto part = partition_from_labels(grid, labels);
    const auto res = batty_entropy(grid, part, 1);
    CHECK(res.global >= res.lower_bound - 1e-12);
    CHECK(res.global <= res.upper_bound + 1e-12);
    double occ = 0.0, locals = 0.0;
    for (double p : res.occurrence) occ += p;
    for (double l : res.local) locals += l;
    CHECK(std::abs(occ - 1.0) < 1e-12);
    CHECK(res.global == locals);
  }
}

TEST_CASE("relabeling non-focal categories changes nothing") {
  Rng rng(11);
  std::vector<int> values(64), swapped(64);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<int>(rng.index(4));
    swapped[i] = values[i] == 2 ? 3 : values[i] == 3 ? 2 : values[i];
  }
  if (std::count(values.begin(), values.end(), 1) == 0) values[0] = swapped[0] = 1;
  const CategoricalGrid a(8, 8, 0.5, {0, 0}, values, 4);
  const CategoricalGrid b(8, 8, 0.5, {0, 0}, swapped, 4);
  const auto part = annuli_partition(a, 3);
  CHECK(batty_entropy(a, part, 1).global == batty_entropy(b, part, 1).global);
  CHECK(kc_entropy(a, part, 1, 1.0).global == kc_entropy(b, part, 1, 1.0).global);
}

TEST_CASE("area adjacency by centroid distance") {
  // three collinear strips spaced d=1 apart
  const CategoricalGrid grid(3, 3, 1.0, {0, 0}, std::vector<int>(9, 0), 1);
  const int strips[] = {0, 1, 2, 0, 1, 2, 0, 1, 2};
  const auto part = partition_from_labels(grid, strips);

  const auto identity = area_adjacency(part, 0.0);
  for (std::size_t g = 0; g < 3; ++g)
    for (std::size_t h = 0; h < 3; ++h)
      CHECK(identity.at(g, h) == (g == h));

  const auto all = area_adjacency(part, 10.0);
  for (std::size_t g = 0; g < 3; ++g)
    for (std::size_t h = 0; h < 3; ++h) CHECK(all.at(g, h));

  const auto chain = area_adjacency(part, 1.0);
  CHECK(chain.at(0, 1));
  CHECK(chain.at(1, 2));
  CHECK_FALSE(chain.at(0, 2));
  CHECK(chain.at(1, 0));  // symmetric

  CHECK_THROWS_AS(area_adjacency(part, -1.0), std::invalid_argument);
}

TEST_CASE("ring adjacency links areas within a step budget") {
  const auto adj = ring_adjacency(5, 2);
  CHECK(adj.at(0, 2));
  CHECK_FALSE(adj.at(0, 3));
  CHECK(adj.at(4, 2));
  CHECK(adj.at(3, 3));
}

TEST_CASE("kc entropy with identity adjacency is Shannon over areas") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nrows = 3 + rng.index(10);
    const std::size_t ncols = 3 + rng.index(10);
    std::vector<int> values(nrows * ncols);
    for (auto& v : values) v = static_cast<int>(rng.index(2));
    values[0] = 1;
    const auto grid = binary_grid(nrows, ncols, 0.5, values);
    const auto part = annuli_partition(grid, 2 + rng.index(4));
    const auto kc = kc_entropy(grid, part, 1, 0.0);
    CHECK(std::abs(kc.global - shannon_entropy(kc.occurrence)) < 1e-12);
  }
}

TEST_CASE("kc entropy hand value for one neighbouring pair") {
  // G = 3, p = (0.5, 0.3, 0.2), areas 0 and 1 neighbours, 2 isolated
  std::vector<int> values(10, 1), labels(10);
  for (std::size_t i = 0; i < 10; ++i) labels[i] = i < 5 ? 0 : i < 8 ? 1 : 2;
  const auto grid = binary_grid(1, 10, 1.0, values);
  const auto part = partition_from_labels(grid, labels);
  Adjacency adj;
  adj.size = 3;
  adj.flat = {1, 1, 0, 1, 1, 0, 0, 0, 1};
  const auto res = kc_entropy(grid, part, 1, adj);
  CHECK(res.global == Approx(1.054920).margin(1e-6));
  CHECK(res.smoothed[0] == Approx(0.4));
  CHECK(res.smoothed[1] == Approx(0.4));
  CHECK(res.smoothed[2] == Approx(0.2));
}

TEST_CASE("kc entropy with full adjacency and uniform occurrence reaches log G") {
  // 4 strips with equal focal counts
  std::vector<int> values(16, 0), labels(16);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      labels[r * 4 + c] = static_cast<int>(c);
      if (r == 0) values[r * 4 + c] = 1;
    }
  const auto grid = binary_grid(4, 4, 1.0, values);
  const auto part = partition_from_labels(grid, labels);
  const auto res = kc_entropy(grid, part, 1, 100.0);
  CHECK(res.global == Approx(std::log(4.0)).margin(1e-12));
  CHECK(res.relative == Approx(1.0));
}

TEST_CASE("kc local terms add up to the global index") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nrows = 3 + rng.index(10);
    const std::size_t ncols = 3 + rng.index(10);
    std::vector<int> values(nrows * ncols), labels(nrows * ncols);
    const std::uint64_t n_areas = 2 + rng.index(6);
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = static_cast<int>(rng.index(2));
      labels[i] = static_cast<int>(rng.index(n_areas));
    }
    values[0] = 1;
    const auto grid = binary_grid(nrows, ncols, 1.0, values);
    const auto part = partition_from_labels(grid, labels);
    const auto res = kc_entropy(grid, part, 1, rng.uniform(0.0, 5.0));
    double locals = 0.0;
    for (double l : res.local) locals += l;
    CHECK(std::abs(locals - res.global) < 1e-12);
    CHECK(res.global >= -1e-12);
  }
}

TEST_CASE("kc entropy in raw-sum mode respects the log G ceiling") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nrows = 3 + rng.index(8);
    const std::size_t ncols = 3 + rng.index(8);
    std::vector<int> values(nrows * ncols), labels(nrows * ncols);
    const std::uint64_t n_areas = 2 + rng.index(5);
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = static_cast<int>(rng.index(2));
      labels[i] = static_cast<int>(rng.index(n_areas));
    }
    values[0] = 1;
    const auto grid = binary_grid(nrows, ncols, 1.0, values);
    const auto part = partition_from_labels(grid, labels);
    const auto res = kc_entropy(grid, part, 1, rng.uniform(0.0, 5.0),
                                KcSmoothing::sum);
    CHECK(res.global >= -1e-12);
    CHECK(res.global <=
          std::log(static_cast<double>(part.n_areas)) + 1e-12);
  }
}
