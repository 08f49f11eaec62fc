#pragma once

#include <chrono>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tnlab/covariance.hpp"
#include "tnlab/experiments.hpp"
#include "tnlab/grid.hpp"

namespace tnlab {

using json = nlohmann::json;

/// Raised for malformed configuration files (maps to exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Experiment configuration <-> JSON.  Parsing is strict: unknown keys are
// rejected so that typos cannot silently fall back to defaults, and the echo
// written into fit.json reparses to an identical configuration.
// ---------------------------------------------------------------------------

inline json to_json(const ExperimentConfig& cfg) {
  return json{{"equation", cfg.equation},
              {"d", cfg.d},
              {"L", cfg.L},
              {"N", cfg.N},
              {"p", cfg.p},
              {"alpha", cfg.alpha},
              {"q", cfg.q},
              {"T", cfg.T},
              {"dt", cfg.dt},
              {"ell_grid", cfg.ell_grid},
              {"lambda", cfg.lambda},
              {"samples", cfg.samples},
              {"seed", cfg.seed},
              {"norm_kind", cfg.norm_kind},
              {"dealias", cfg.dealias},
              {"dealias_noise", cfg.dealias_noise},
              {"noise_courant", cfg.noise_courant},
              {"epsilon", cfg.epsilon},
              {"initial_data",
               {{"family", cfg.init.family},
                {"amplitude", cfg.init.amplitude},
                {"radius", cfg.init.radius},
                {"beta", cfg.init.beta}}},
              {"snapshot_every", cfg.snapshot_every},
              {"path_diagnostics", cfg.path_diagnostics},
              {"l_doubling_check", cfg.l_doubling_check}};
}

namespace detail {

template <typename T>
void take(json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
    j.erase(it);
  }
}

inline void reject_unknown(const json& j, const std::string& where) {
  if (!j.empty()) {
    std::string keys;
    for (auto& el : j.items()) keys += (keys.empty() ? "" : ", ") + el.key();
    throw ConfigError("unknown config key(s) in " + where + ": " + keys);
  }
}

}  // namespace detail

inline ExperimentConfig experiment_config_from_json(json j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  ExperimentConfig cfg;
  detail::take(j, "equation", cfg.equation);
  detail::take(j, "d", cfg.d);
  detail::take(j, "L", cfg.L);
  detail::take(j, "N", cfg.N);
  detail::take(j, "p", cfg.p);
  detail::take(j, "alpha", cfg.alpha);
  detail::take(j, "q", cfg.q);
  detail::take(j, "T", cfg.T);
  detail::take(j, "dt", cfg.dt);
  detail::take(j, "ell_grid", cfg.ell_grid);
  detail::take(j, "lambda", cfg.lambda);
  detail::take(j, "samples", cfg.samples);
  detail::take(j, "seed", cfg.seed);
  detail::take(j, "norm_kind", cfg.norm_kind);
  detail::take(j, "dealias", cfg.dealias);
  detail::take(j, "dealias_noise", cfg.dealias_noise);
  detail::take(j, "noise_courant", cfg.noise_courant);
  detail::take(j, "epsilon", cfg.epsilon);
  detail::take(j, "snapshot_every", cfg.snapshot_every);
  detail::take(j, "path_diagnostics", cfg.path_diagnostics);
  detail::take(j, "l_doubling_check", cfg.l_doubling_check);
  if (auto it = j.find("initial_data"); it != j.end()) {
    json init = *it;
    j.erase(it);
    detail::take(init, "family", cfg.init.family);
    detail::take(init, "amplitude", cfg.init.amplitude);
    detail::take(init, "radius", cfg.init.radius);
    detail::take(init, "beta", cfg.init.beta);
    detail::reject_unknown(init, "initial_data");
  }
  detail::reject_unknown(j, "config");
  return cfg;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Covariance specification (noise-validate configs and tabulated densities).
// ---------------------------------------------------------------------------

/// Two-column CSV (|xi|, g), optional header line.
inline CovarianceSpec load_tabulated_csv(int dim, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open density table: " + path);
  std::vector<double> rho, g;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream row(line);
    double a, b;
    if (row >> a >> b) {
      rho.push_back(a);
      g.push_back(b);
    } else if (!rho.empty()) {
      throw ConfigError("malformed row in density table: " + line);
    }
  }
  return tabulated_spec(dim, std::move(rho), std::move(g));
}

inline CovarianceSpec covariance_from_json(int dim, json j) {
  if (!j.is_object()) throw ConfigError("covariance must be a JSON object");
  std::string family;
  detail::take(j, "family", family);
  CovarianceSpec spec;
  if (family == "kraichnan") {
    double ell = 0.0, lambda = 1.0;
    detail::take(j, "ell", ell);
    detail::take(j, "lambda", lambda);
    spec = kraichnan_spec(dim, ell, lambda);
  } else if (family == "band") {
    double lo = 0.0, hi = 0.0, height = 1.0;
    detail::take(j, "lo", lo);
    detail::take(j, "hi", hi);
    detail::take(j, "height", height);
    spec = band_spec(dim, lo, hi, height);
  } else if (family == "tabulated") {
    std::string csv;
    detail::take(j, "csv", csv);
    spec = load_tabulated_csv(dim, csv);
  } else if (family == "zero") {
    spec = zero_spec(dim);
  } else {
    throw ConfigError("unknown covariance family: '" + family + "'");
  }
  double mollify_scale = 0.0;
  if (auto it = j.find("mollify"); it != j.end()) {
    mollify_scale = it->get<double>();
    j.erase(it);
    spec = mollify(spec, mollify_scale);
  }
  detail::reject_unknown(j, "covariance");
  return spec;
}

// ---------------------------------------------------------------------------
// Field snapshots: one JSON header line, then raw little-endian 64-bit floats
// in row-major order.  Extension ".fld".
// ---------------------------------------------------------------------------

inline void write_fld(const std::string& path, const ScalarField& f,
                      const std::string& quantity, double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open snapshot for writing: " + path);
  json header{{"dim", f.grid.dim},
              {"L", f.grid.box_length},
              {"N", f.grid.points_per_dim},
              {"quantity", quantity},
              {"time", time}};
  out << header.dump() << "\n";
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

struct FieldSnapshot {
  ScalarField field;
  std::string quantity;
  double time = 0.0;
};

inline FieldSnapshot read_fld(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot: " + path);
  std::string header_line;
  if (!std::getline(in, header_line)) throw Error("snapshot missing header: " + path);
  json header = json::parse(header_line);
  Grid grid(header.at("dim").get<int>(), header.at("L").get<double>(),
            header.at("N").get<int>());
  FieldSnapshot snap;
  snap.quantity = header.at("quantity").get<std::string>();
  snap.time = header.at("time").get<double>();
  snap.field = ScalarField(grid);
  in.read(reinterpret_cast<char*>(snap.field.values.data()),
          static_cast<std::streamsize>(grid.size() * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != grid.size() * sizeof(double))
    throw Error("snapshot truncated: " + path);
  return snap;
}

// ---------------------------------------------------------------------------
// Tabular and structured result files.
// ---------------------------------------------------------------------------

inline std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_rates_csv(const std::string& path,
                            const std::vector<EllEstimate>& results) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "ell,estimate,stderr,bound_rhs\n";
  for (const auto& r : results)
    out << format_full(r.ell) << ',' << format_full(r.estimate) << ','
        << format_full(r.stderr_) << ',' << format_full(r.bound) << '\n';
}

inline json fit_to_json(const RateFit& fit, const ExperimentConfig& cfg,
                        const std::vector<EllEstimate>& results,
                        const char* version) {
  json per_ell = json::array();
  for (const auto& r : results)
    per_ell.push_back({{"ell", r.ell},
                       {"estimate", r.estimate},
                       {"stderr", r.stderr_},
                       {"bound_rhs", r.bound},
                       {"kappa_grid", r.kappa_grid},
                       {"max_defect", r.max_defect},
                       {"implied_constant", r.bound > 0.0 ? r.estimate / r.bound : 0.0}});
  return json{{"slope", fit.slope},
              {"intercept", fit.intercept},
              {"slope_ci", {fit.slope_ci_lo, fit.slope_ci_hi}},
              {"predicted_exponent", fit.predicted},
              {"bound_constant", fit.bound_constant},
              {"constant_spread", fit.constant_spread},
              {"monotone_2sigma", fit.monotone_2sigma},
              {"estimates", per_ell},
              {"config", to_json(cfg)},
              {"version", version}};
}

inline std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace tnlab
