#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "spatent/area_entropy.hpp"
#include "spatent/cooccurrence.hpp"
#include "spatent/errors.hpp"
#include "spatent/grid.hpp"
#include "spatent/partition.hpp"
#include "spatent/rng.hpp"
#include "spatent/scenario.hpp"
#include "spatent/serialize.hpp"

namespace spatent {

/// Replication study over a set of scenarios sharing one window geometry:
/// every replicate evaluates Batty (both partition options), the
/// neighbourhood-smoothed entropy at every neighbourhood choice, and the
/// mutual-information decomposition under both distance-break options.
struct StudyConfig {
  std::vector<ScenarioConfig> scenarios;
  std::size_t n_replicates = 100;
  std::uint64_t master_seed = 0;
  std::size_t voronoi_areas = 20;
  std::size_t annuli_rings = 5;
  std::vector<double> nd_fractions = {0.05, 0.25, 0.50};
  std::vector<double> break_fractions = {0.05, 0.25, 0.50};
  bool fix_voronoi = false;  // one partition for the whole study

  void validate() const {
    if (scenarios.empty()) throw config_error("study needs at least 1 scenario");
    if (n_replicates < 2) throw config_error("study needs at least 2 replicates");
    if (voronoi_areas < 2) throw config_error("voronoi_areas must be >= 2");
    if (annuli_rings < 2) throw config_error("annuli_rings must be >= 2");
    for (const auto& cfg : scenarios) cfg.validate();
    const auto& first = scenarios.front();
    for (const auto& cfg : scenarios) {
      if (cfg.nrows != first.nrows || cfg.ncols != first.ncols ||
          cfg.window_side != first.window_side)
        throw config_error("all study scenarios must share one geometry");
      if (cfg.target_urban != first.target_urban)
        throw config_error(
            "all study scenarios must share target_urban so that urban "
            "counts match across scenarios");
    }
    auto check_fracs = [](const std::vector<double>& fs, const char* name) {
      for (std::size_t i = 0; i < fs.size(); ++i) {
        if (!(fs[i] > 0.0 && fs[i] < 1.0))
          throw config_error(std::string(name) + " must lie in (0,1)");
        if (i > 0 && !(fs[i] > fs[i - 1]))
          throw config_error(std::string(name) + " must be increasing");
      }
    };
    check_fracs(nd_fractions, "nd_fractions");
    check_fracs(break_fractions, "break_fractions");
  }
};

struct StudyRecord {
  std::string measure;
  std::string scenario;
  std::string option;
  std::size_t replicate = 0;
  double value = 0.0;
};

struct SummaryStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// All replicate values in a fixed order plus quartile summaries computed
/// from the stored vectors (no separate accumulation path).
class StudySummary {
 public:
  StudySummary(StudyConfig config, std::vector<StudyRecord> records)
      : config_(std::move(config)), records_(std::move(records)) {}

  const StudyConfig& config() const { return config_; }
  const std::vector<StudyRecord>& records() const { return records_; }

  /// Unique (measure, scenario, option) keys in first-appearance order.
  std::vector<std::tuple<std::string, std::string, std::string>> keys() const {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& rec : records_) {
      auto key = std::make_tuple(rec.measure, rec.scenario, rec.option);
      if (std::find(out.begin(), out.end(), key) == out.end())
        out.push_back(std::move(key));
    }
    return out;
  }

  std::vector<double> values(const std::string& measure,
                             const std::string& scenario,
                             const std::string& option) const {
    std::vector<double> out;
    for (const auto& rec : records_)
      if (rec.measure == measure && rec.scenario == scenario &&
          rec.option == option)
        out.push_back(rec.value);
    return out;
  }

  SummaryStats stats(const std::string& measure, const std::string& scenario,
                     const std::string& option) const {
    auto v = values(measure, scenario, option);
    if (v.empty()) throw std::invalid_argument("no such study cell: " + measure +
                                               "/" + scenario + "/" + option);
    std::sort(v.begin(), v.end());
    return {v.front(), nearest_rank(v, 0.25), nearest_rank(v, 0.50),
            nearest_rank(v, 0.75), v.back()};
  }

  void write_csv(std::ostream& out) const {
    out << "measure,scenario,option,replicate,value\n";
    for (const auto& rec : records_)
      out << rec.measure << ',' << rec.scenario << ',' << rec.option << ','
          << rec.replicate << ',' << fmt_g6(rec.value) << "\n";
  }

  /// Quartiles plus per-scenario [min,max] reference intervals.
  nlohmann::json digest() const {
    nlohmann::json quartiles = nlohmann::json::array();
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& [measure, scenario, option] : keys()) {
      const auto st = stats(measure, scenario, option);
      quartiles.push_back({{"measure", measure},
                           {"scenario", scenario},
                           {"option", option},
                           {"min", st.min},
                           {"q1", st.q1},
                           {"median", st.median},
                           {"q3", st.q3},
                           {"max", st.max}});
      intervals.push_back({{"measure", measure},
                           {"scenario", scenario},
                           {"option", option},
                           {"min", st.min},
                           {"max", st.max}});
    }
    return {{"replicates", config_.n_replicates},
            {"master_seed", config_.master_seed},
            {"quartiles", std::move(quartiles)},
            {"reference_intervals", std::move(intervals)}};
  }

 private:
  StudyConfig config_;
  std::vector<StudyRecord> records_;
};

namespace detail {

// stream purposes for counter-based seed derivation
inline constexpr std::uint64_t kSeedVoronoi = 0x766f726f;  // "voro"
inline constexpr std::uint64_t kSeedGrid = 0x67726964;     // "grid"

inline std::vector<StudyRecord> study_replicate(const StudyConfig& cfg,
                                                std::size_t rep,
                                                const CategoricalGrid& geometry,
                                                const AreaPartition& annuli,
                                                const DistanceClassSpec& fixed,
                                                const DistanceClassSpec& pct) {
  std::vector<StudyRecord> out;
  const std::string annuli_tag =
      "annuli:" + std::to_string(cfg.annuli_rings);
  const std::string voronoi_tag =
      "voronoi:" + std::to_string(cfg.voronoi_areas);

  Rng part_rng(derive_seed(cfg.master_seed, kSeedVoronoi,
                           cfg.fix_voronoi ? 0 : rep + 1));
  const AreaPartition voronoi =
      voronoi_partition(geometry, cfg.voronoi_areas, part_rng);
  const std::vector<double> nds =
      centroid_distance_percentiles(voronoi, cfg.nd_fractions);

  for (std::size_t s = 0; s < cfg.scenarios.size(); ++s) {
    const std::string scen(to_string(cfg.scenarios[s].kind));
    auto push = [&](std::string measure, std::string option, double value) {
      out.push_back(
          {std::move(measure), scen, std::move(option), rep, value});
    };

    Rng grid_rng(derive_seed(cfg.master_seed, kSeedGrid, rep, s));
    const CategoricalGrid grid = sample_scenario(cfg.scenarios[s], grid_rng);

    push("batty_rel", voronoi_tag, batty_entropy(grid, voronoi, 1).relative);
    push("batty_rel", annuli_tag, batty_entropy(grid, annuli, 1).relative);

    for (std::size_t i = 0; i < nds.size(); ++i)
      push("kc_rel", voronoi_tag + ",nd" + std::to_string(i + 1),
           kc_entropy(grid, voronoi, 1, nds[i]).relative);
    for (std::size_t j = 1; j < annuli.n_areas; ++j)
      push("kc_rel", annuli_tag + ",ann" + std::to_string(j),
           kc_entropy(grid, annuli, 1, ring_adjacency(annuli.n_areas, j))
               .relative);

    const std::pair<const char*, const DistanceClassSpec*> options[] = {
        {"breaks:fixed", &fixed}, {"breaks:pct", &pct}};
    for (const auto& [tag, spec] : options) {
      const auto dec = entropy_decomposition(enumerate_pairs(grid, *spec));
      push("h_z", tag, dec.h_z);
      push("mi", tag, dec.mutual_information);
      push("residual", tag, dec.residual);
      for (std::size_t k = 0; k < dec.classes.size(); ++k) {
        const std::string w = ",w" + std::to_string(k + 1);
        push("pi", tag + w, dec.classes[k].partial_information);
        push("h_cond", tag + w, dec.classes[k].partial_residual);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Runs the replication study. Replicates execute independently (optionally
/// in parallel); each owns a derived RNG stream and writes into its own
/// result slot, so output is byte-identical for any worker count.
inline StudySummary run_study(const StudyConfig& cfg, unsigned n_threads = 1) {
  cfg.validate();
  const auto& base = cfg.scenarios.front();
  const CategoricalGrid geometry(
      base.nrows, base.ncols, base.cell_side(), {0.0, 0.0},
      std::vector<int>(base.nrows * base.ncols, 0), 1);
  const AreaPartition annuli = annuli_partition(geometry, cfg.annuli_rings);
  const DistanceClassSpec fixed = DistanceClassSpec::fixed(
      geometry.cell_side(), geometry.max_centroid_distance());
  const DistanceClassSpec pct =
      distance_breaks_percentile(geometry, cfg.break_fractions);

  std::vector<std::vector<StudyRecord>> per_rep(cfg.n_replicates);
  if (n_threads == 0) n_threads = std::thread::hardware_concurrency();
  n_threads = std::max<unsigned>(
      1, std::min<unsigned>(n_threads,
                            static_cast<unsigned>(cfg.n_replicates)));
  if (n_threads <= 1) {
    for (std::size_t rep = 0; rep < cfg.n_replicates; ++rep)
      per_rep[rep] =
          detail::study_replicate(cfg, rep, geometry, annuli, fixed, pct);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      workers.emplace_back([&]() {
        while (true) {
          const std::size_t rep = next.fetch_add(1);
          if (rep >= cfg.n_replicates) break;
          per_rep[rep] =
              detail::study_replicate(cfg, rep, geometry, annuli, fixed, pct);
        }
      });
    }
    for (auto& w : workers) w.join();
  }

  std::vector<StudyRecord> records;
  for (auto& chunk : per_rep)
    records.insert(records.end(), std::make_move_iterator(chunk.begin()),
                   std::make_move_iterator(chunk.end()));
  return StudySummary(cfg, std::move(records));
}

// ---- JSON configuration documents ------------------------------------------

inline ScenarioConfig scenario_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("scenario config must be an object");
  if (!j.contains("kind"))
    throw config_error("scenario config needs a 'kind'");
  ScenarioConfig cfg = ScenarioConfig::defaults_for(
      scenario_kind_from_string(j.at("kind").get<std::string>()));
  try {
    if (j.contains("nrows")) cfg.nrows = j.at("nrows").get<std::size_t>();
    if (j.contains("ncols")) cfg.ncols = j.at("ncols").get<std::size_t>();
    if (j.contains("window_side"))
      cfg.window_side = j.at("window_side").get<double>();
    if (j.contains("target_urban"))
      cfg.target_urban = j.at("target_urban").get<std::size_t>();
    if (j.contains("n_clusters"))
      cfg.n_clusters = j.at("n_clusters").get<std::size_t>();
    if (j.contains("cluster_sd"))
      cfg.cluster_sd = j.at("cluster_sd").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad scenario config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline nlohmann::json scenario_config_to_json(const ScenarioConfig& cfg) {
  return {{"kind", std::string(to_string(cfg.kind))},
          {"nrows", cfg.nrows},
          {"ncols", cfg.ncols},
          {"window_side", cfg.window_side},
          {"target_urban", cfg.target_urban},
          {"n_clusters", cfg.n_clusters},
          {"cluster_sd", cfg.cluster_sd},
          {"seed", cfg.seed}};
}

inline StudyConfig study_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("study config must be an object");
  StudyConfig cfg;
  try {
    if (j.contains("seed")) cfg.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("replicates"))
      cfg.n_replicates = j.at("replicates").get<std::size_t>();
    if (j.contains("voronoi_areas"))
      cfg.voronoi_areas = j.at("voronoi_areas").get<std::size_t>();
    if (j.contains("annuli_rings"))
      cfg.annuli_rings = j.at("annuli_rings").get<std::size_t>();
    if (j.contains("nd_fractions"))
      cfg.nd_fractions = j.at("nd_fractions").get<std::vector<double>>();
    if (j.contains("break_fractions"))
      cfg.break_fractions = j.at("break_fractions").get<std::vector<double>>();
    if (j.contains("fix_voronoi"))
      cfg.fix_voronoi = j.at("fix_voronoi").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad study config: ") + e.what());
  }
  if (j.contains("scenarios")) {
    if (!j.at("scenarios").is_array())
      throw config_error("'scenarios' must be an array");
    for (const auto& sj : j.at("scenarios"))
      cfg.scenarios.push_back(scenario_config_from_json(sj));
  } else {
    for (auto kind : {ScenarioKind::monocentric, ScenarioKind::polycentric,
                      ScenarioKind::decentralized})
      cfg.scenarios.push_back(ScenarioConfig::defaults_for(kind));
  }
  cfg.validate();
  return cfg;
}

inline nlohmann::json study_config_to_json(const StudyConfig& cfg) {
  nlohmann::json scenarios = nlohmann::json::array();
  for (const auto& s : cfg.scenarios)
    scenarios.push_back(scenario_config_to_json(s));
  return {{"seed", cfg.master_seed},
          {"replicates", cfg.n_replicates},
          {"voronoi_areas", cfg.voronoi_areas},
          {"annuli_rings", cfg.annuli_rings},
          {"nd_fractions", cfg.nd_fractions},
          {"break_fractions", cfg.break_fractions},
          {"fix_voronoi", cfg.fix_voronoi},
          {"scenarios", std::move(scenarios)}};
}

}  // namespace spatent
