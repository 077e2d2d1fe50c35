// spatent: spatial entropy measures for categorical lattices.
//
// Subcommands:
//   entropy   -- evaluate one measure on a grid file, write JSON + CSV
//   simulate  -- draw scenario grids from a config, write ASCII rasters
//   study     -- run the replication study, write tidy CSV + digest JSON
//
// Exit codes: 0 success, 2 usage/config error, 3 data/precondition error.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spatent/area_entropy.hpp"
#include "spatent/cooccurrence.hpp"
#include "spatent/errors.hpp"
#include "spatent/grid.hpp"
#include "spatent/grid_io.hpp"
#include "spatent/manifest.hpp"
#include "spatent/partition.hpp"
#include "spatent/rng.hpp"
#include "spatent/scenario.hpp"
#include "spatent/serialize.hpp"
#include "spatent/study.hpp"
#include "spatent/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spatent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

unsigned workers_from_env() {
  if (const char* env = std::getenv("SPATENT_THREADS")) {
    unsigned v = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0)
      throw config_error("SPATENT_THREADS must be a positive integer, got '" +
                         s + "'");
    return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw config_error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

GridLoadResult load_grid(const std::string& path, const std::string& format,
                         double cell_side, double origin_x, double origin_y) {
  const bool csv = format == "csv" ||
                   (format == "auto" && fs::path(path).extension() == ".csv");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file: " + path);
  return csv ? load_csv_grid(in, cell_side, {origin_x, origin_y})
             : load_ascii_grid(in);
}

// ---- flag value parsing -----------------------------------------------------

struct PartitionSpec {
  enum class Kind { voronoi, annuli, labels } kind = Kind::annuli;
  std::size_t count = 0;
  std::string path;
};

PartitionSpec parse_partition(const std::string& text) {
  PartitionSpec spec;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail =
      colon == std::string::npos ? "" : text.substr(colon + 1);
  auto parse_count = [&](const char* what) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), v);
    if (ec != std::errc() || p != tail.data() + tail.size() || v < 2)
      throw config_error(std::string("--partition ") + what +
                         ":N needs an integer N >= 2, got '" + tail + "'");
    return v;
  };
  if (head == "voronoi") {
    spec.kind = PartitionSpec::Kind::voronoi;
    spec.count = parse_count("voronoi");
  } else if (head == "annuli") {
    spec.kind = PartitionSpec::Kind::annuli;
    spec.count = parse_count("annuli");
  } else if (head == "labels") {
    if (tail.empty()) throw config_error("--partition labels:PATH needs a path");
    spec.kind = PartitionSpec::Kind::labels;
    spec.path = tail;
  } else {
    throw config_error("--partition must be voronoi:N, annuli:N or labels:PATH");
  }
  return spec;
}

struct NdSpec {
  enum class Kind { value, percentile, rings } kind = Kind::value;
  double value = 0.0;      // distance or percent
  std::size_t steps = 0;   // ring steps
};

NdSpec parse_nd(const std::string& text) {
  NdSpec spec;
  if (text.rfind("pct:", 0) == 0) {
    spec.kind = NdSpec::Kind::percentile;
    try {
      spec.value = std::stod(text.substr(4));
    } catch (const std::exception&) {
      throw config_error("--nd pct:P needs a number, got '" + text + "'");
    }
    if (!(spec.value > 0.0 && spec.value < 100.0))
      throw config_error("--nd pct:P needs a percent in (0,100)");
  } else if (text.rfind("ann:", 0) == 0) {
    const std::string tail = text.substr(4);
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), v);
    if (ec != std::errc() || p != tail.data() + tail.size() || v == 0)
      throw config_error("--nd ann:J needs an integer J >= 1");
    spec.kind = NdSpec::Kind::rings;
    spec.steps = v;
  } else {
    try {
      spec.value = std::stod(text);
    } catch (const std::exception&) {
      throw config_error("--nd must be a distance, pct:P or ann:J, got '" +
                         text + "'");
    }
    if (spec.value < 0.0) throw config_error("--nd distance must be >= 0");
  }
  return spec;
}

struct BreaksSpec {
  enum class Kind { fixed, percentile, explicit_bounds } kind = Kind::fixed;
  std::vector<double> values;  // fractions or upper bounds
};

std::vector<double> parse_number_list(const std::string& tail,
                                      const char* flag) {
  std::vector<double> out;
  std::stringstream ss(tail);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw config_error(std::string(flag) + ": '" + item +
                         "' is not a number");
    }
  }
  if (out.empty())
    throw config_error(std::string(flag) + " needs at least one value");
  return out;
}

BreaksSpec parse_breaks(const std::string& text) {
  BreaksSpec spec;
  if (text == "fixed") {
    spec.kind = BreaksSpec::Kind::fixed;
  } else if (text.rfind("pct:", 0) == 0) {
    spec.kind = BreaksSpec::Kind::percentile;
    for (double pct : parse_number_list(text.substr(4), "--breaks pct")) {
      if (!(pct > 0.0 && pct < 100.0))
        throw config_error("--breaks pct percentiles must lie in (0,100)");
      spec.values.push_back(pct / 100.0);
    }
  } else if (text.rfind("explicit:", 0) == 0) {
    spec.kind = BreaksSpec::Kind::explicit_bounds;
    spec.values = parse_number_list(text.substr(9), "--breaks explicit");
  } else {
    throw config_error(
        "--breaks must be fixed, pct:p1,p2,... or explicit:b1,b2,...");
  }
  return spec;
}

// ---- entropy subcommand -----------------------------------------------------

struct EntropyOptions {
  std::string grid_path;
  std::string format = "auto";
  double cell_side = 1.0;   // csv grids only
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::string measure;
  std::string partition_text;
  std::string nd_text;
  std::string breaks_text = "fixed";
  bool breaks_given = false;
  bool kc_sum = false;
  int focal = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
};

AreaPartition build_partition(const PartitionSpec& spec,
                              const CategoricalGrid& grid, std::uint64_t seed,
                              std::vector<std::string>& inputs,
                              json& parameters) {
  switch (spec.kind) {
    case PartitionSpec::Kind::voronoi: {
      Rng rng(seed);
      parameters["partition"] = "voronoi:" + std::to_string(spec.count);
      return voronoi_partition(grid, spec.count, rng);
    }
    case PartitionSpec::Kind::annuli:
      parameters["partition"] = "annuli:" + std::to_string(spec.count);
      return annuli_partition(grid, spec.count);
    case PartitionSpec::Kind::labels: {
      const auto labels = load_ascii_grid_file(spec.path);
      inputs.push_back(spec.path);
      parameters["partition"] = "labels:" + spec.path;
      if (labels.grid.rows() != grid.rows() ||
          labels.grid.cols() != grid.cols())
        throw std::invalid_argument(
            "label map shape does not match the grid (" +
            std::to_string(labels.grid.rows()) + "x" +
            std::to_string(labels.grid.cols()) + " vs " +
            std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()) +
            ")");
      return partition_from_labels(grid, labels.grid.values());
    }
  }
  throw config_error("unreachable partition kind");
}

int run_entropy(const EntropyOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();

  // flag consistency first: usage errors must not depend on the data
  const bool needs_partition = opt.measure == "batty" || opt.measure == "kc";
  if (needs_partition && opt.partition_text.empty())
    throw config_error("--measure " + opt.measure + " requires --partition");
  if (!needs_partition && !opt.partition_text.empty())
    throw config_error("--partition is not meaningful for --measure " +
                       opt.measure);
  if (opt.measure == "kc" && opt.nd_text.empty())
    throw config_error("--measure kc requires --nd");
  if (opt.measure != "kc" && !opt.nd_text.empty())
    throw config_error("--nd is only meaningful for --measure kc");
  if (opt.measure != "spatial" && opt.breaks_given)
    throw config_error("--breaks is only meaningful for --measure spatial");

  const PartitionSpec part_spec =
      needs_partition ? parse_partition(opt.partition_text) : PartitionSpec{};
  const NdSpec nd_spec =
      opt.measure == "kc" ? parse_nd(opt.nd_text) : NdSpec{};
  const BreaksSpec breaks_spec =
      opt.measure == "spatial" ? parse_breaks(opt.breaks_text) : BreaksSpec{};

  const auto loaded = load_grid(opt.grid_path, opt.format, opt.cell_side,
                                opt.origin_x, opt.origin_y);
  const CategoricalGrid& grid = loaded.grid;

  std::vector<std::string> inputs{opt.grid_path};
  json parameters{{"measure", opt.measure},
                  {"grid", opt.grid_path},
                  {"seed", opt.seed}};
  if (!loaded.code_map.empty()) parameters["code_map"] = loaded.code_map;

  json result;
  std::ostringstream csv;

  if (opt.measure == "shannon") {
    const auto p = grid.category_proportions();
    const double h = shannon_entropy(p);
    const double rel =
        grid.n_categories() > 1
            ? h / std::log(static_cast<double>(grid.n_categories()))
            : 0.0;
    result = shannon_json(h, rel, p, parameters);
    shannon_csv(csv, h, rel, p);
  } else if (opt.measure == "batty") {
    parameters["focal"] = opt.focal;
    const auto part =
        build_partition(part_spec, grid, opt.seed, inputs, parameters);
    const auto res = batty_entropy(grid, part, opt.focal);
    result = batty_json(res, parameters);
    batty_csv(csv, res);
  } else if (opt.measure == "kc") {
    parameters["focal"] = opt.focal;
    parameters["smoothing"] = opt.kc_sum ? "sum" : "average";
    const auto part =
        build_partition(part_spec, grid, opt.seed, inputs, parameters);
    const auto smoothing = opt.kc_sum ? KcSmoothing::sum : KcSmoothing::average;
    KCResult res;
    if (nd_spec.kind == NdSpec::Kind::rings) {
      parameters["nd"] = "ann:" + std::to_string(nd_spec.steps);
      res = kc_entropy(grid, part, opt.focal,
                       ring_adjacency(part.n_areas, nd_spec.steps), smoothing);
    } else {
      double nd = nd_spec.value;
      if (nd_spec.kind == NdSpec::Kind::percentile) {
        const double frac[] = {nd_spec.value / 100.0};
        nd = centroid_distance_percentiles(part, frac)[0];
        parameters["nd"] = "pct:" + fmt_g6(nd_spec.value);
      } else {
        parameters["nd"] = nd;
      }
      parameters["nd_distance"] = nd;
      res = kc_entropy(grid, part, opt.focal, nd, smoothing);
    }
    result = kc_json(res, parameters);
    kc_csv(csv, res);
  } else {  // spatial
    DistanceClassSpec spec({0.0, 1.0});
    const double d_max = grid.max_centroid_distance();
    switch (breaks_spec.kind) {
      case BreaksSpec::Kind::fixed:
        spec = DistanceClassSpec::fixed(grid.cell_side(), d_max);
        parameters["breaks"] = "fixed";
        break;
      case BreaksSpec::Kind::percentile:
        spec = distance_breaks_percentile(grid, breaks_spec.values);
        parameters["breaks"] = opt.breaks_text;
        break;
      case BreaksSpec::Kind::explicit_bounds: {
        std::vector<double> breaks{0.0};
        for (double b : breaks_spec.values) {
          if (b <= breaks.back())
            throw config_error("--breaks explicit bounds must increase");
          breaks.push_back(b);
        }
        if (breaks.back() < d_max) breaks.push_back(d_max);
        spec = DistanceClassSpec(std::move(breaks));
        parameters["breaks"] = opt.breaks_text;
        break;
      }
    }
    parameters["breakpoints"] = spec.breaks();
    const auto pd = enumerate_pairs(grid, spec, workers_from_env());
    const auto dec = entropy_decomposition(pd);
    result = decomposition_json(dec, parameters);
    result["n_pairs"] = pd.n_pairs;
    decomposition_csv(csv, dec);
  }

  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  const fs::path json_path = out_dir / "result.json";
  const fs::path csv_path = out_dir / "result.csv";
  {
    std::ofstream jf(json_path);
    jf << result.dump(2) << "\n";
    std::ofstream cf(csv_path);
    cf << csv.str();
  }

  RunManifest manifest;
  manifest.command = "entropy";
  manifest.inputs = inputs;
  manifest.parameters = parameters;
  manifest.master_seed = opt.seed;
  manifest.outputs = {json_path.string(), csv_path.string()};
  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest.write(out_dir / "manifest.json");
  std::cout << "wrote " << json_path.string() << "\n";
  return kExitOk;
}

// ---- simulate subcommand ----------------------------------------------------

int run_simulate(const std::string& config_path, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const json doc = read_json_file(config_path);

  json scenario_docs = json::array();
  std::uint64_t master_seed = 0;
  if (doc.is_object() && doc.contains("scenarios")) {
    if (!doc.at("scenarios").is_array())
      throw config_error("'scenarios' must be an array");
    scenario_docs = doc.at("scenarios");
    if (doc.contains("seed")) master_seed = doc.at("seed").get<std::uint64_t>();
  } else {
    scenario_docs.push_back(doc);
    if (doc.is_object() && doc.contains("seed"))
      master_seed = doc.at("seed").get<std::uint64_t>();
  }
  if (scenario_docs.empty())
    throw config_error("simulate config contains no scenarios");

  std::vector<ScenarioConfig> configs;
  std::vector<bool> own_seed;
  for (const auto& sj : scenario_docs) {
    configs.push_back(scenario_config_from_json(sj));
    own_seed.push_back(sj.contains("seed"));
  }

  // file names: kind, suffixed with the index when a kind repeats
  std::map<std::string, int> kind_uses;
  for (const auto& cfg : configs) ++kind_uses[std::string(to_string(cfg.kind))];

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::vector<std::string> outputs;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& cfg = configs[i];
    const std::uint64_t seed =
        own_seed[i] ? cfg.seed : derive_seed(master_seed, i);
    Rng rng(seed);
    const auto grid = sample_scenario(cfg, rng);
    std::string name(to_string(cfg.kind));
    if (kind_uses[name] > 1) name += "_" + std::to_string(i);
    const fs::path path = dir / (name + ".asc");
    save_ascii_grid_file(path, grid);
    outputs.push_back(path.string());
    std::cout << "wrote " << path.string() << "\n";
  }

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.inputs = {config_path};
  manifest.parameters = doc;
  manifest.master_seed = master_seed;
  manifest.outputs = outputs;
  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest.write(dir / "manifest.json");
  return kExitOk;
}

// ---- study subcommand ---------------------------------------------------------

int run_study_cmd(const std::string& config_path, const std::string& out_dir,
                  std::optional<std::size_t> replicates) {
  const auto t0 = std::chrono::steady_clock::now();
  StudyConfig cfg = study_config_from_json(read_json_file(config_path));
  if (replicates) {
    cfg.n_replicates = *replicates;
    cfg.validate();
  }

  const auto summary = run_study(cfg, workers_from_env());

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const fs::path csv_path = dir / "study.csv";
  const fs::path digest_path = dir / "digest.json";
  {
    std::ofstream cf(csv_path);
    summary.write_csv(cf);
    std::ofstream df(digest_path);
    df << summary.digest().dump(2) << "\n";
  }

  RunManifest manifest;
  manifest.command = "study";
  manifest.inputs = {config_path};
  manifest.parameters = study_config_to_json(cfg);
  manifest.master_seed = cfg.master_seed;
  manifest.outputs = {csv_path.string(), digest_path.string()};
  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest.write(dir / "manifest.json");
  std::cout << "wrote " << csv_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatial entropy measures for categorical lattice data"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  EntropyOptions eopt;
  auto* entropy = app.add_subcommand(
      "entropy", "evaluate one entropy measure on a grid file");
  entropy->add_option("--grid", eopt.grid_path, "grid file (ASCII or CSV)")
      ->required();
  entropy->add_option("--format", eopt.format, "grid format")
      ->check(CLI::IsMember({"auto", "ascii", "csv"}));
  entropy->add_option("--cell-side", eopt.cell_side,
                      "cell side for CSV grids (default 1)");
  entropy->add_option("--origin-x", eopt.origin_x, "window origin x (CSV)");
  entropy->add_option("--origin-y", eopt.origin_y, "window origin y (CSV)");
  entropy->add_option("--measure", eopt.measure, "measure to compute")
      ->required()
      ->check(CLI::IsMember({"shannon", "batty", "kc", "spatial"}));
  entropy->add_option("--partition", eopt.partition_text,
                      "voronoi:N | annuli:N | labels:PATH");
  entropy->add_option("--focal", eopt.focal,
                      "focal category code (default 1)");
  entropy->add_option("--nd", eopt.nd_text,
                      "neighbourhood distance: VALUE | pct:P | ann:J");
  entropy
      ->add_option("--breaks", eopt.breaks_text,
                   "fixed | pct:p1,p2,... | explicit:b1,b2,...")
      ->each([&eopt](const std::string&) { eopt.breaks_given = true; });
  entropy->add_flag("--kc-sum", eopt.kc_sum,
                    "raw-sum neighbourhood smoothing instead of averaging");
  entropy->add_option("--seed", eopt.seed, "seed for random partitions");
  entropy->add_option("--out", eopt.out_dir, "output directory")->required();

  std::string sim_config, sim_out;
  auto* simulate =
      app.add_subcommand("simulate", "draw scenario grids from a JSON config");
  simulate->add_option("--config", sim_config, "scenario config JSON")
      ->required();
  simulate->add_option("--out", sim_out, "output directory")->required();

  std::string study_config, study_out;
  std::optional<std::size_t> study_reps;
  auto* study = app.add_subcommand(
      "study", "run the comparative replication study from a JSON config");
  study->add_option("--config", study_config, "study config JSON")->required();
  study->add_option("--replicates", study_reps,
                    "override the replicate count");
  study->add_option("--out", study_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (entropy->parsed()) return run_entropy(eopt);
    if (simulate->parsed()) return run_simulate(sim_config, sim_out);
    if (study->parsed()) return run_study_cmd(study_config, study_out, study_reps);
    return kExitUsage;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const parse_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
}
