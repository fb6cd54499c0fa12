#pragma once

/**
 * @file io.hpp
 * @brief JSON configs (schedule, certificate params, term systems, reports) and CSV files.
 *
 * Schedule:  {"pattern": {"offsets": [..], "period": P, "origin": 0}}  or  {"times": [..], "horizon": H}
 * Params:    {"c", "rho1", "rho2", "kappa", "tau", "lambda", "mu"?}
 * System:    {"dimension", "tau", "flow": [term..], "jump": [term..], "initial"?: [..]}
 *            term = {"gain": [[..]], "read": "point"|"integral", "lag", "saturate"?}
 *
 * Doubles are written with 17 significant digits; non-finite values as the
 * strings "inf", "-inf", "nan".
 */

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "impdelay/certificate.hpp"
#include "impdelay/core.hpp"
#include "impdelay/lyapunov.hpp"
#include "impdelay/schedule.hpp"
#include "impdelay/term_system.hpp"

namespace impdelay {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double get_number(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError(path + ": expected a number");
}

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key + ": missing field");
  return *it;
}

inline double get_field(const Json& j, const std::string& key, const std::string& path) {
  return get_number(field(j, key, path), path + "." + key);
}

inline double get_field_or(const Json& j, const std::string& key, const std::string& path, double fallback) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  return j.contains(key) ? get_field(j, key, path) : fallback;
}

inline std::vector<double> get_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Matrix get_matrix(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(get_vector(j[i], path + "[" + std::to_string(i) + "]"));
  try {
    return Matrix::from_rows(rows);
  } catch (const DimensionError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (const auto& r : m.to_rows()) rows.push_back(r);
  return rows;
}

}  // namespace detail

/// Parses JSON text; syntax errors carry line and column.
inline Json parse_json(const std::string& text, const std::string& source = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// schedule

inline Json to_json(const ImpulseSchedule& s) {
  Json j;
  if (s.is_periodic()) {
    const auto& p = s.pattern();
    j["pattern"] = {{"offsets", p.offsets}, {"period", p.period}, {"origin", p.origin}};
  } else {
    const auto& l = s.list();
    j["times"] = l.times;
    j["horizon"] = detail::number(l.horizon);
  }
  return j;
}

inline ImpulseSchedule schedule_from_json(const Json& j, const std::string& path = "schedule") {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  try {
    if (j.contains("pattern")) {
      const auto& p = j["pattern"];
      const std::string pp = path + ".pattern";
      return ImpulseSchedule::periodic(detail::get_vector(detail::field(p, "offsets", pp), pp + ".offsets"),
                                       detail::get_field(p, "period", pp), detail::get_field_or(p, "origin", pp, 0.0));
    }
    if (j.contains("times")) {
      return ImpulseSchedule::explicit_list(detail::get_vector(j["times"], path + ".times"),
                                            detail::get_field(j, "horizon", path));
    }
  } catch (const ScheduleError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ": expected a 'pattern' or a 'times' field");
}

// ---------------------------------------------------------------------------
// certificate parameters and report

inline Json to_json(const CertificateParams& p) {
  Json j{{"c", p.c}, {"rho1", p.rho1}, {"rho2", p.rho2}, {"kappa", p.kappa}, {"tau", p.tau}, {"lambda", p.lambda}};
  if (p.mu) j["mu"] = detail::number(*p.mu);
  return j;
}

inline CertificateParams params_from_json(const Json& j, const std::string& path = "params") {
  CertificateParams p;
  p.c = detail::get_field(j, "c", path);
  p.rho1 = detail::get_field(j, "rho1", path);
  p.rho2 = detail::get_field(j, "rho2", path);
  p.kappa = detail::get_field(j, "kappa", path);
  p.tau = detail::get_field(j, "tau", path);
  p.lambda = detail::get_field_or(j, "lambda", path, p.lambda);
  if (j.contains("mu")) p.mu = detail::get_field(j, "mu", path);
  try {
    p.validate();
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return p;
}

inline Json to_json(const SupremumWitness& w) {
  return Json{{"s", w.s}, {"t", w.t}, {"count", w.count}, {"s_from_left", w.s_from_left}, {"t_from_left", w.t_from_left}};
}

inline Json to_json(const CertificateReport& r) {
  Json j;
  j["verdict"] = r.certified ? "GAS-certified" : "not certified";
  j["reason"] = r.reason;
  j["params"] = to_json(r.params);
  j["case"] = to_string(r.sigma_result.case_tag);
  j["sigma"] = r.sigma_result.sigma ? detail::number(*r.sigma_result.sigma) : Json();
  if (r.sigma_result.binding_window_count) j["binding_window_count"] = *r.sigma_result.binding_window_count;
  j["regime"] = r.regime;
  j["direction"] = to_string(r.dwell.direction);
  if (r.dwell.adt) {
    j["t_star"] = detail::number(r.dwell.adt->t_star);
    j["n_star"] = detail::number(r.dwell.adt->n_star);
  }
  j["minimal_mu"] = detail::number(r.minimal.mu);
  j["minimal_mu_unbounded"] = r.minimal.unbounded;
  if (r.minimal.drift) j["drift_per_period"] = detail::number(*r.minimal.drift);
  j["minimal_mu_witness"] = to_json(r.minimal.witness);
  j["mu_used"] = detail::number(r.mu_used);
  j["condition_v"] = r.condition_v;
  j["condition_v_slack"] = detail::number(r.condition_v_slack);
  if (r.dwell_check) {
    j["dwell_check"] = {{"holds", r.dwell_check->holds},
                        {"worst_slack", detail::number(r.dwell_check->worst_slack)},
                        {"witness", to_json(r.dwell_check->witness)}};
  }
  if (r.count_band) {
    j["window_count_band"] = {{"lower", detail::number(r.count_band->lower)},
                              {"upper", detail::number(r.count_band->upper)}};
  }
  j["horizon_limited"] = r.horizon_limited;
  j["t0"] = r.t0;
  j["horizon"] = detail::number(r.horizon);
  return j;
}

/// 17-significant-digit JSON text.
inline std::string dump(const Json& j) {
  // nlohmann writes doubles with max_digits10 already; indent for readability.
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// term systems

inline Json to_json(const Term& t) {
  return Json{{"gain", detail::matrix_json(t.gain)},
              {"read", t.read == Term::Read::point ? "point" : "integral"},
              {"lag", t.lag},
              {"saturate", t.saturate}};
}

inline Term term_from_json(const Json& j, const std::string& path) {
  Term t;
  t.gain = detail::get_matrix(detail::field(j, "gain", path), path + ".gain");
  const auto& read = detail::field(j, "read", path);
  if (!read.is_string()) throw ConfigError(path + ".read: expected \"point\" or \"integral\"");
  const auto r = read.get<std::string>();
  if (r == "point") {
    t.read = Term::Read::point;
  } else if (r == "integral") {
    t.read = Term::Read::integral;
  } else {
    throw ConfigError(path + ".read: expected \"point\" or \"integral\", got \"" + r + "\"");
  }
  t.lag = detail::get_field_or(j, "lag", path, 0.0);
  if (j.contains("saturate")) {
    if (!j["saturate"].is_boolean()) throw ConfigError(path + ".saturate: expected true or false");
    t.saturate = j["saturate"].get<bool>();
  }
  return t;
}

inline Json to_json(const TermSystem& s) {
  Json j{{"dimension", s.dimension}, {"tau", s.tau}, {"flow", Json::array()}, {"jump", Json::array()}};
  for (const auto& t : s.flow) j["flow"].push_back(to_json(t));
  for (const auto& t : s.jump) j["jump"].push_back(to_json(t));
  return j;
}

inline TermSystem system_from_json(const Json& j, const std::string& path = "system") {
  TermSystem s;
  const double dim = detail::get_field(j, "dimension", path);
  if (!(dim >= 1.0) || dim != std::floor(dim)) throw ConfigError(path + ".dimension: expected a positive integer");
  s.dimension = static_cast<std::size_t>(dim);
  s.tau = detail::get_field(j, "tau", path);
  for (const char* side : {"flow", "jump"}) {
    const std::string sp = path + "." + side;
    if (!j.contains(side)) continue;
    if (!j[side].is_array()) throw ConfigError(sp + ": expected an array of terms");
    auto& dst = std::string(side) == "flow" ? s.flow : s.jump;
    for (std::size_t i = 0; i < j[side].size(); ++i) dst.push_back(term_from_json(j[side][i], sp + "[" + std::to_string(i) + "]"));
  }
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// CSV

/// Columns t, x_1..x_n, is_impulse; every stored node including the initial history.
/// Impulse nodes give two rows, the left limit (is_impulse = 1) first, then the post-jump value (is_impulse = 1).
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto prec = os.precision(17);
  os << "t";
  for (std::size_t i = 0; i < traj.dim(); ++i) os << ",x_" << i + 1;
  os << ",is_impulse\n";
  auto row = [&](Time t, const State& x, bool impulse) {
    os << t;
    for (double v : x) os << ',' << v;
    os << ',' << (impulse ? 1 : 0) << '\n';
  };
  for (const auto& n : traj.samples().nodes()) {
    if (n.left) row(n.t, *n.left, true);
    row(n.t, n.x, static_cast<bool>(n.left));
  }
  os.precision(prec);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Numeric CSV with a header line; errors name the line and column.
inline CsvTable read_numeric_csv(std::istream& in, const std::string& source = "csv") {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(source + ": empty file");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(source + ": line " + std::to_string(lineno) + ", column " + std::to_string(row.size() + 1) +
                          ": not a number: '" + cell + "'");
      }
    }
    if (row.size() != table.header.size()) {
      throw ConfigError(source + ": line " + std::to_string(lineno) + ": expected " +
                        std::to_string(table.header.size()) + " columns, got " + std::to_string(row.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct TrajectoryRow {
  Time t;
  State x;
  bool is_impulse;
};

inline std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in, const std::string& source = "trajectory") {
  auto table = read_numeric_csv(in, source);
  if (table.header.size() < 3 || table.header.front() != "t" || table.header.back() != "is_impulse") {
    throw ConfigError(source + ": header must be t,x_1..x_n,is_impulse");
  }
  std::vector<TrajectoryRow> out;
  out.reserve(table.rows.size());
  for (auto& r : table.rows) {
    out.push_back(TrajectoryRow{r.front(), State(r.begin() + 1, r.end() - 1), r.back() != 0.0});
  }
  return out;
}

struct LyapunovRow {
  Time t;
  double w1, w2, w, envelope_bound, norm_bound;
};

inline std::vector<LyapunovRow> read_lyapunov_csv(std::istream& in, const std::string& source = "lyapunov") {
  auto table = read_numeric_csv(in, source);
  const std::vector<std::string> expected{"t", "W1", "W2", "W", "envelope_bound", "norm_bound"};
  if (table.header != expected) throw ConfigError(source + ": header must be t,W1,W2,W,envelope_bound,norm_bound");
  std::vector<LyapunovRow> out;
  out.reserve(table.rows.size());
  for (auto& r : table.rows) out.push_back(LyapunovRow{r[0], r[1], r[2], r[3], r[4], r[5]});
  return out;
}

}  // namespace impdelay
