#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spatent/errors.hpp"
#include "spatent/grid.hpp"
#include "spatent/rng.hpp"

namespace spatent {

enum class ScenarioKind { monocentric, polycentric, decentralized };

inline std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::monocentric: return "monocentric";
    case ScenarioKind::polycentric: return "polycentric";
    case ScenarioKind::decentralized: return "decentralized";
  }
  return "?";
}

inline ScenarioKind scenario_kind_from_string(std::string_view name) {
  if (name == "monocentric") return ScenarioKind::monocentric;
  if (name == "polycentric") return ScenarioKind::polycentric;
  if (name == "decentralized") return ScenarioKind::decentralized;
  throw config_error("unknown scenario kind '" + std::string(name) +
                     "' (expected monocentric|polycentric|decentralized)");
}

/// Parameters of one synthetic urban scenario: a binary grid with exactly
/// target_urban urban pixels, drawn from one cluster (monocentric), four
/// clusters (polycentric) or a uniform point process (decentralized).
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::monocentric;
  std::size_t nrows = 40;
  std::size_t ncols = 40;
  double window_side = 10.0;  // horizontal extent; cell side = side / ncols
  std::size_t target_urban = 288;
  std::size_t n_clusters = 1;   // 1 mono, 4 poly, 0 decentralized
  double cluster_sd = 0.8;      // offspring dispersion, window units
  std::uint64_t seed = 0;

  double cell_side() const { return window_side / static_cast<double>(ncols); }

  static ScenarioConfig defaults_for(ScenarioKind kind) {
    ScenarioConfig cfg;
    cfg.kind = kind;
    switch (kind) {
      case ScenarioKind::monocentric:
        cfg.n_clusters = 1;
        cfg.cluster_sd = 0.8;
        break;
      case ScenarioKind::polycentric:
        cfg.n_clusters = 4;
        cfg.cluster_sd = 0.4;
        break;
      case ScenarioKind::decentralized:
        cfg.n_clusters = 0;
        cfg.cluster_sd = 0.0;
        break;
    }
    return cfg;
  }

  void validate() const {
    if (nrows == 0 || ncols == 0)
      throw config_error("scenario grid dimensions must be positive");
    if (!(window_side > 0.0))
      throw config_error("scenario window_side must be positive");
    if (target_urban == 0 || target_urban >= nrows * ncols)
      throw config_error(
          "target_urban must satisfy 0 < target_urban < nrows*ncols, got " +
          std::to_string(target_urban) + " on " + std::to_string(nrows) + "x" +
          std::to_string(ncols));
    const bool clustered = kind != ScenarioKind::decentralized;
    if (clustered && !(cluster_sd > 0.0))
      throw config_error("cluster_sd must be positive for clustered scenarios");
    if (kind == ScenarioKind::monocentric && n_clusters != 1)
      throw config_error("monocentric scenarios use exactly 1 cluster");
    if (kind == ScenarioKind::polycentric && n_clusters < 2)
      throw config_error("polycentric scenarios need at least 2 clusters");
    if (kind == ScenarioKind::decentralized && n_clusters != 0)
      throw config_error("decentralized scenarios have no clusters");
  }
};

/// Draws one scenario realization. Candidate points arrive one at a time
/// (cluster scenarios: uniform parent choice plus isotropic Gaussian
/// displacement, points outside the window rejected; decentralized: uniform
/// over the window); each accepted point marks its containing pixel urban,
/// until exactly target_urban distinct pixels are urban.
inline CategoricalGrid sample_scenario(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  const double width = cfg.window_side;
  const double height =
      cfg.cell_side() * static_cast<double>(cfg.nrows);
  const double s = cfg.cell_side();

  std::vector<Coordinate> parents;
  if (cfg.kind == ScenarioKind::monocentric) {
    parents.push_back({width / 2.0, height / 2.0});
  } else if (cfg.kind == ScenarioKind::polycentric) {
    // parents confined to the central 80% so clusters are not corner-clipped
    for (std::size_t i = 0; i < cfg.n_clusters; ++i)
      parents.push_back({rng.uniform(0.1 * width, 0.9 * width),
                         rng.uniform(0.1 * height, 0.9 * height)});
  }

  std::vector<int> values(cfg.nrows * cfg.ncols, 0);
  std::size_t urban = 0;
  while (urban < cfg.target_urban) {
    double x, y;
    if (parents.empty()) {
      x = rng.uniform() * width;
      y = rng.uniform() * height;
    } else {
      const Coordinate& p =
          parents.size() > 1 ? parents[rng.index(parents.size())] : parents[0];
      x = p.x + rng.normal(0.0, cfg.cluster_sd);
      y = p.y + rng.normal(0.0, cfg.cluster_sd);
      if (x < 0.0 || x >= width || y < 0.0 || y >= height) continue;
    }
    const auto col = static_cast<std::size_t>(x / s);
    const auto row = static_cast<std::size_t>(y / s);
    int& cell = values[std::min(row, cfg.nrows - 1) * cfg.ncols +
                       std::min(col, cfg.ncols - 1)];
    if (cell == 0) {
      cell = 1;
      ++urban;
    }
  }
  return CategoricalGrid(cfg.nrows, cfg.ncols, s, {0.0, 0.0},
                         std::move(values), 2);
}

}  // namespace spatent
