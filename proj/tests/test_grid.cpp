#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "spatent/grid.hpp"
#include "spatent/grid_io.hpp"
#include "spatent/rng.hpp"

using namespace spatent;
using Catch::Approx;

namespace {

CategoricalGrid random_grid(Rng& rng, std::size_t max_dim = 12,
                            int max_categories = 4) {
  const std::size_t nrows = 1 + rng.index(max_dim);
  const std::size_t ncols = 1 + rng.index(max_dim);
  const int n_cat = 2 + static_cast<int>(rng.index(
                            static_cast<std::uint64_t>(max_categories - 1)));
  std::vector<int> values(nrows * ncols);
  for (auto& v : values) v = static_cast<int>(rng.index(n_cat));
  return CategoricalGrid(nrows, ncols, 0.1 + rng.uniform(), {rng.uniform(-5, 5), rng.uniform(-5, 5)},
                         std::move(values), n_cat);
}

}  // namespace

TEST_CASE("ascii loader reads a minimal checkerboard") {
  std::istringstream in(
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 0.25\n"
      "0 1\n"
      "1 0\n");
  const auto res = load_ascii_grid(in);
  CHECK(res.grid.rows() == 2);
  CHECK(res.grid.cols() == 2);
  CHECK(res.grid.n_categories() == 2);
  CHECK(res.grid.total_size() == Approx(0.25));
  // first body line is the top of the window
  CHECK(res.grid.at(1, 0) == 0);
  CHECK(res.grid.at(1, 1) == 1);
  CHECK(res.grid.at(0, 0) == 1);
  CHECK(res.grid.at(0, 1) == 0);
  CHECK(res.code_map == std::vector<long long>{0, 1});
}

TEST_CASE("ascii loader densifies sparse codes in sorted order") {
  std::istringstream in(
      "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
      "7 3\n");
  const auto res = load_ascii_grid(in);
  CHECK(res.grid.n_categories() == 2);
  CHECK(res.code_map == std::vector<long long>{3, 7});  // 3 -> 0, 7 -> 1
  CHECK(res.grid.at(0, 0) == 1);
  CHECK(res.grid.at(0, 1) == 0);
}

TEST_CASE("ascii loader accepts a degenerate single-category grid") {
  std::ostringstream body;
  body << "ncols 40\nnrows 40\nxllcorner 0\nyllcorner 0\ncellsize 0.25\n";
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 40; ++c) body << (c ? " 0" : "0");
    body << "\n";
  }
  std::istringstream in(body.str());
  const auto res = load_ascii_grid(in);
  CHECK(res.grid.n_categories() == 1);
  CHECK(res.grid.n_cells() == 1600);
}

TEST_CASE("ascii loader reports malformed input with line and column") {
  SECTION("wrong header key") {
    std::istringstream in("ncols 2\nrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n0 0\n0 0\n");
    CHECK_THROWS_AS(load_ascii_grid(in), parse_error);
  }
  SECTION("ragged row") {
    std::istringstream in(
        "ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
        "0 1 0\n"
        "0 1\n");
    try {
      load_ascii_grid(in);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      CHECK(e.line() == 7);
    }
  }
  SECTION("non-integer cell") {
    std::istringstream in(
        "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
        "0 x\n");
    try {
      load_ascii_grid(in);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      CHECK(e.line() == 6);
      CHECK(e.column() == 3);
    }
  }
  SECTION("missing body rows") {
    std::istringstream in("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n0 0\n");
    CHECK_THROWS_AS(load_ascii_grid(in), parse_error);
  }
  SECTION("non-positive cellsize") {
    std::istringstream in("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 0\n0 0\n");
    CHECK_THROWS_AS(load_ascii_grid(in), parse_error);
  }
}

TEST_CASE("pixel centroids follow bottom-up Cartesian geometry") {
  std::vector<int> zeros(1600, 0);
  const CategoricalGrid grid(40, 40, 0.25, {0.0, 0.0}, zeros, 1);
  CHECK(grid.centroid(0, 0).x == Approx(0.125));
  CHECK(grid.centroid(0, 0).y == Approx(0.125));
  CHECK(grid.centroid(39, 39).x == Approx(9.875));
  CHECK(grid.centroid(39, 39).y == Approx(9.875));
  const double corner =
      distance(grid.centroid(0, 0), grid.centroid(39, 39));
  CHECK(corner == Approx(13.789).margin(5e-4));
  CHECK(grid.max_centroid_distance() == Approx(corner));
  CHECK_THROWS_AS(grid.centroid(40, 0), std::out_of_range);
  CHECK_THROWS_AS(grid.at(0, 40), std::out_of_range);
}

TEST_CASE("category proportions") {
  const CategoricalGrid checker(2, 2, 1.0, {0, 0}, {0, 1, 1, 0}, 2);
  const auto p = checker.category_proportions();
  CHECK(p[0] == Approx(0.5));
  CHECK(p[1] == Approx(0.5));

  // all-zero grid with two declared categories
  const CategoricalGrid zeros(3, 3, 1.0, {0, 0}, std::vector<int>(9, 0), 2);
  const auto pz = zeros.category_proportions();
  CHECK(pz[0] == 1.0);
  CHECK(pz[1] == 0.0);

  // 288 urban cells of 1600
  std::vector<int> values(1600, 0);
  for (int i = 0; i < 288; ++i) values[static_cast<std::size_t>(i * 5)] = 1;
  const CategoricalGrid urban(40, 40, 0.25, {0, 0}, values, 2);
  const auto pu = urban.category_proportions();
  CHECK(pu[0] == Approx(0.82));
  CHECK(pu[1] == Approx(0.18));
}

TEST_CASE("proportions sum to 1 and distances behave metrically") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto grid = random_grid(rng);
    double sum = 0.0;
    for (double v : grid.category_proportions()) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);

    // sampled triples: symmetry and triangle inequality
    for (int t = 0; t < 10; ++t) {
      auto pick = [&]() {
        return grid.centroid(rng.index(grid.rows()), rng.index(grid.cols()));
      };
      const auto a = pick(), b = pick(), c = pick();
      CHECK(distance(a, b) == distance(b, a));
      CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
    }
  }
}

TEST_CASE("ascii round trip is bit-exact") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t nrows = 1 + rng.index(9);
    const std::size_t ncols = 1 + rng.index(9);
    std::vector<int> values(nrows * ncols);
    for (auto& v : values) v = static_cast<int>(rng.index(3));
    const double side = rng.uniform(0.01, 3.0);
    const CategoricalGrid grid(nrows, ncols, side,
                               {rng.uniform(-10, 10), rng.uniform(-10, 10)},
                               values, 3);
    std::stringstream buffer;
    save_ascii_grid(buffer, grid);
    const auto back = load_ascii_grid(buffer);
    REQUIRE(back.grid.rows() == grid.rows());
    REQUIRE(back.grid.cols() == grid.cols());
    CHECK(back.grid.cell_side() == grid.cell_side());
    CHECK(back.grid.origin().x == grid.origin().x);
    CHECK(back.grid.origin().y == grid.origin().y);
    CHECK(back.grid.values() == grid.values());
  }
}

TEST_CASE("csv loader matches the ascii semantics") {
  std::istringstream csv(
      "row,col,code\n"
      "0,0,1\n"
      "0,1,0\n"
      "1,0,0\n"
      "1,1,1\n");
  const auto res = load_csv_grid(csv, 0.25, {0.0, 0.0});
  CHECK(res.grid.rows() == 2);
  CHECK(res.grid.cols() == 2);
  CHECK(res.grid.cell_side() == 0.25);
  CHECK(res.grid.at(0, 0) == 1);
  CHECK(res.grid.at(1, 1) == 1);
  CHECK(res.grid.at(0, 1) == 0);
}

TEST_CASE("csv loader rejects gaps and duplicates") {
  SECTION("missing cell") {
    std::istringstream csv("row,col,code\n0,0,1\n1,1,0\n");
    CHECK_THROWS_AS(load_csv_grid(csv), parse_error);
  }
  SECTION("duplicate cell") {
    std::istringstream csv("0,0,1\n0,0,2\n0,1,0\n1,0,0\n1,1,0\n");
    CHECK_THROWS_AS(load_csv_grid(csv), parse_error);
  }
  SECTION("bad field") {
    std::istringstream csv("0,0,a\n");
    CHECK_THROWS_AS(load_csv_grid(csv), parse_error);
  }
}

TEST_CASE("grid constructor validates invariants") {
  CHECK_THROWS_AS(CategoricalGrid(0, 2, 1.0, {0, 0}, {}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(CategoricalGrid(1, 2, 0.0, {0, 0}, {0, 0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(CategoricalGrid(1, 2, 1.0, {0, 0}, {0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(CategoricalGrid(1, 2, 1.0, {0, 0}, {0, 3}, 2),
                  std::invalid_argument);
}
