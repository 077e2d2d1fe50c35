#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "spatent/area_entropy.hpp"
#include "spatent/cooccurrence.hpp"

namespace spatent {

/// CSV numbers carry 6 significant digits; JSON keeps full precision.
inline std::string fmt_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline nlohmann::json json_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

// ---- classic measures -----------------------------------------------------

inline nlohmann::json batty_json(const BattyResult& res,
                                 nlohmann::json parameters) {
  nlohmann::json per_area = nlohmann::json::array();
  for (std::size_t g = 0; g < res.occurrence.size(); ++g)
    per_area.push_back({{"area", g},
                        {"size", res.sizes[g]},
                        {"occurrence", res.occurrence[g]},
                        {"intensity", res.intensity[g]},
                        {"local", res.local[g]}});
  return {{"measure", "batty"},
          {"global", res.global},
          {"relative", json_or_null(res.relative)},
          {"bounds", {{"lower", res.lower_bound}, {"upper", res.upper_bound}}},
          {"per_area", std::move(per_area)},
          {"parameters", std::move(parameters)}};
}

inline void batty_csv(std::ostream& out, const BattyResult& res) {
  out << "measure,area,size,occurrence,intensity,local,global,relative\n";
  for (std::size_t g = 0; g < res.occurrence.size(); ++g)
    out << "batty," << g << ',' << fmt_g6(res.sizes[g]) << ','
        << fmt_g6(res.occurrence[g]) << ',' << fmt_g6(res.intensity[g]) << ','
        << fmt_g6(res.local[g]) << ',' << fmt_g6(res.global) << ','
        << fmt_g6(res.relative) << "\n";
}

inline nlohmann::json kc_json(const KCResult& res, nlohmann::json parameters) {
  nlohmann::json per_area = nlohmann::json::array();
  for (std::size_t g = 0; g < res.occurrence.size(); ++g)
    per_area.push_back({{"area", g},
                        {"occurrence", res.occurrence[g]},
                        {"smoothed", res.smoothed[g]},
                        {"local", res.local[g]}});
  return {{"measure", "karlstrom_ceccato"},
          {"global", res.global},
          {"relative", json_or_null(res.relative)},
          {"per_area", std::move(per_area)},
          {"parameters", std::move(parameters)}};
}

inline void kc_csv(std::ostream& out, const KCResult& res) {
  out << "measure,area,occurrence,smoothed,local,global,relative\n";
  for (std::size_t g = 0; g < res.occurrence.size(); ++g)
    out << "karlstrom_ceccato," << g << ',' << fmt_g6(res.occurrence[g]) << ','
        << fmt_g6(res.smoothed[g]) << ',' << fmt_g6(res.local[g]) << ','
        << fmt_g6(res.global) << ',' << fmt_g6(res.relative) << "\n";
}

inline nlohmann::json shannon_json(double global, double relative,
                                   const std::vector<double>& proportions,
                                   nlohmann::json parameters) {
  nlohmann::json per_category = nlohmann::json::array();
  for (std::size_t i = 0; i < proportions.size(); ++i)
    per_category.push_back({{"category", i}, {"proportion", proportions[i]}});
  return {{"measure", "shannon"},
          {"global", global},
          {"relative", json_or_null(relative)},
          {"per_category", std::move(per_category)},
          {"parameters", std::move(parameters)}};
}

inline void shannon_csv(std::ostream& out, double global, double relative,
                        const std::vector<double>& proportions) {
  out << "measure,category,proportion,global,relative\n";
  for (std::size_t i = 0; i < proportions.size(); ++i)
    out << "shannon," << i << ',' << fmt_g6(proportions[i]) << ','
        << fmt_g6(global) << ',' << fmt_g6(relative) << "\n";
}

// ---- co-occurrence decomposition -------------------------------------------

inline nlohmann::json decomposition_json(const EntropyDecomposition& dec,
                                         nlohmann::json parameters) {
  const auto props = proportional_terms(dec);
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t k = 0; k < dec.classes.size(); ++k) {
    const auto& cls = dec.classes[k];
    nlohmann::json item = {{"k", k + 1},
                           {"lo", cls.lower},
                           {"hi", cls.upper},
                           {"p_w", cls.weight},
                           {"pi", cls.partial_information},
                           {"h", cls.partial_residual},
                           {"empty", cls.empty}};
    if (props[k].defined) {
      item["pi_prop"] = props[k].information;
      item["h_prop"] = props[k].residual;
    } else {
      item["pi_prop"] = nullptr;
      item["h_prop"] = nullptr;
    }
    classes.push_back(std::move(item));
  }
  return {{"measure", "spatial"},
          {"h_z", dec.h_z},
          {"mi", dec.mutual_information},
          {"residual", dec.residual},
          {"classes", std::move(classes)},
          {"parameters", std::move(parameters)}};
}

/// Tidy layout, one row per distance class, ready for plotting.
inline void decomposition_csv(std::ostream& out,
                              const EntropyDecomposition& dec) {
  const auto props = proportional_terms(dec);
  out << "k,lo,hi,p_w,pi,h,pi_prop,h_prop,h_z,mi,residual\n";
  for (std::size_t k = 0; k < dec.classes.size(); ++k) {
    const auto& cls = dec.classes[k];
    out << (k + 1) << ',' << fmt_g6(cls.lower) << ',' << fmt_g6(cls.upper)
        << ',' << fmt_g6(cls.weight) << ',' << fmt_g6(cls.partial_information)
        << ',' << fmt_g6(cls.partial_residual) << ',';
    if (props[k].defined)
      out << fmt_g6(props[k].information) << ',' << fmt_g6(props[k].residual);
    else
      out << ',';
    out << ',' << fmt_g6(dec.h_z) << ',' << fmt_g6(dec.mutual_information)
        << ',' << fmt_g6(dec.residual) << "\n";
  }
}

}  // namespace spatent
