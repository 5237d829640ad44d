// Copyright 2026 The phiqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Everything lives in run_cli so the test suite can
// drive it with in-memory streams; main() only forwards argv and the env.

#ifndef PHIQKD_TOOLS_CLI_HPP
#define PHIQKD_TOOLS_CLI_HPP

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "phiqkd/gsd.hpp"
#include "phiqkd/keyrate.hpp"
#include "phiqkd/optimizer.hpp"
#include "phiqkd/simulator.hpp"

namespace phiqkd::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr int kExitOk = 0;
inline constexpr int kExitNoKey = 1;
inline constexpr int kExitUsage = 2;
inline constexpr std::uint64_t kLongShots = 100'000'000;

/// Raised for anything the user can fix by changing arguments.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { text, csv, json };

struct RunConfig {
  std::string theta = "0.7853981633974483";
  std::string phi = "0";
  FiniteKeyParams fk;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string grid;        // phi grid, start:stop:count
  std::string theta_grid;  // theta grid, start:stop:count
  std::string mode = "composable";
  std::uint64_t shots = 1'000'000;
  std::string format;  // empty: the command's default
  std::string output;
  bool degrees = false;
  bool require_positive = false;
  bool long_mode = false;
};

// ---------------------------------------------------------------- formatting

inline std::string fmt(double x) {
  if (!std::isfinite(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline Json jnum(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
inline Json jnum(const std::optional<double>& x) { return x ? jnum(*x) : Json(nullptr); }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline void write_csv(std::ostream& os, const Table& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline void write_aligned(std::ostream& os, const Table& t) {
  std::vector<std::size_t> width(t.header.size());
  for (std::size_t i = 0; i < width.size(); ++i) width[i] = t.header[i].size();
  for (const auto& r : t.rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], std::max<std::size_t>(r[i].size(), 1));
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string& c = cells[i].empty() ? std::string("-") : cells[i];
      os << (i ? "  " : "") << std::string(width[i] - c.size(), ' ') << c;
    }
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline std::string text_value(const Json& v) {
  if (v.is_number_float()) return fmt(v.get<double>());
  if (v.is_null()) return "n/a";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + text_value(v[i]);
    return s + "]";
  }
  return v.dump();
}

inline void write_text_record(std::ostream& os, const Json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& v = it.value();
    if (v.is_object()) {
      os << pad << it.key() << ":\n";
      write_text_record(os, v, indent + 2);
    } else {
      os << pad << it.key() << ": " << text_value(v) << '\n';
    }
  }
}

/// One command's result: a JSON document always, and a table for CSV output.
struct Document {
  Json json;
  std::optional<Table> table;
  Format default_format = Format::text;
};

// ------------------------------------------------------------------ parsing

inline double parse_number(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError(std::string("invalid ") + what + ": '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw UsageError(std::string("invalid ") + what + ": '" + s + "'");
  return v;
}

inline double to_radians(double x, bool degrees) { return degrees ? x * std::numbers::pi / 180.0 : x; }

struct GridSpec {
  double start;
  double stop;
  std::size_t count;
};

inline GridSpec parse_grid(const std::string& spec, bool degrees) {
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
  if (b == std::string::npos || spec.find(':', b + 1) != std::string::npos) {
    throw UsageError("grid must be start:stop:count, got '" + spec + "'");
  }
  const double start = parse_number(spec.substr(0, a), "grid start");
  const double stop = parse_number(spec.substr(a + 1, b - a - 1), "grid stop");
  const std::string count_s = spec.substr(b + 1);
  if (count_s.empty() || count_s.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError("grid count must be a positive integer, got '" + count_s + "'");
  }
  const unsigned long long count = std::stoull(count_s);
  if (count == 0 || count > 10'000'000) throw UsageError("grid count out of range: " + count_s);
  if (stop < start) throw UsageError("grid stop lies below start");
  return {to_radians(start, degrees), to_radians(stop, degrees), static_cast<std::size_t>(count)};
}

inline SignalPair parse_theta(const RunConfig& cfg) {
  const double theta = to_radians(parse_number(cfg.theta, "theta"), cfg.degrees);
  try {
    return SignalPair(theta);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
}

/// Numeric tilt, or one of the named operating points idp, med, ctp, erp.
inline double parse_phi(const RunConfig& cfg, const SignalPair& sp) {
  double phi = 0.0;
  if (cfg.phi == "idp") {
    phi = 0.0;
  } else if (cfg.phi == "med") {
    phi = sp.phi_max();
  } else if (cfg.phi == "ctp" || cfg.phi == "erp") {
    try {
      phi = cfg.phi == "ctp" ? find_ctp(sp) : find_erp(sp);
    } catch (const std::domain_error& e) {
      throw UsageError(std::string(cfg.phi) + " does not exist at this theta: " + e.what());
    }
  } else {
    phi = to_radians(parse_number(cfg.phi, "phi"), cfg.degrees);
  }
  try {
    require_tilt(sp, phi);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  return std::clamp(phi, 0.0, sp.phi_max());
}

inline Json params_json(const FiniteKeyParams& fk) {
  Json j;
  j["N"] = fk.total_signals;
  j["n"] = fk.test_bits;
  j["eps_pe"] = fk.eps_pe;
  j["eps_sec"] = fk.eps_sec;
  j["eps_cor"] = fk.eps_cor;
  j["f"] = fk.ec_efficiency;
  return j;
}

inline Json header_json(const char* command) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

inline Json probs_json(const OutcomeProbs& p) {
  Json j;
  j["p_s"] = jnum(p.p_s);
  j["p_e"] = jnum(p.p_e);
  j["p_q"] = jnum(p.p_q);
  return j;
}

inline Json matrix_json(const Op2& m) {
  Json re = Json::array(), im = Json::array();
  for (int i = 0; i < 2; ++i) {
    re.push_back(Json::array({jnum(m(i, 0).real()), jnum(m(i, 1).real())}));
    im.push_back(Json::array({jnum(m(i, 0).imag()), jnum(m(i, 1).imag())}));
  }
  Json j;
  j["re"] = re;
  j["im"] = im;
  return j;
}

inline std::optional<DiscriminationMetrics> safe_metrics(const OutcomeProbs& p) {
  if (!(p.p_q < 1.0)) return std::nullopt;
  return metrics(p);
}

// ----------------------------------------------------------------- commands

inline Document cmd_povm(const RunConfig& cfg) {
  const SignalPair sp = parse_theta(cfg);
  const double phi = parse_phi(cfg, sp);
  const TiltedPovm povm = build_povm(sp, phi);
  const OutcomeProbs closed = probs_closed(sp, phi);
  const OutcomeProbs op = probs_operator(sp, povm);
  const auto m = safe_metrics(closed);

  Document d;
  d.json = header_json("povm");
  d.json["theta"] = sp.theta();
  d.json["phi"] = phi;
  d.json["povm"] = {{"pi1", matrix_json(povm.pi1)}, {"pi2", matrix_json(povm.pi2)}, {"pi0", matrix_json(povm.pi0)}};
  d.json["probs_closed"] = probs_json(closed);
  d.json["probs_operator"] = probs_json(op);
  d.json["chi"] = m ? jnum(m->chi) : Json(nullptr);
  d.json["zeta"] = m ? jnum(m->zeta) : Json(nullptr);
  d.json["completeness_residual"] = povm.completeness_residual();

  Table t;
  t.header = {"theta", "phi", "p_s", "p_e", "p_q", "p_s_operator", "p_e_operator", "p_q_operator", "chi", "zeta",
              "completeness_residual"};
  t.rows.push_back({fmt(sp.theta()), fmt(phi), fmt(closed.p_s), fmt(closed.p_e), fmt(closed.p_q), fmt(op.p_s),
                    fmt(op.p_e), fmt(op.p_q), m ? fmt(m->chi) : "", m ? fmt(m->zeta) : "",
                    fmt(povm.completeness_residual())});
  d.table = std::move(t);
  return d;
}

/// Named operating points with their accuracy and efficiency.
inline Document cmd_points(const RunConfig& cfg) {
  const SignalPair sp = parse_theta(cfg);
  Document d;
  d.json = header_json("points");
  d.json["theta"] = sp.theta();
  Json rows = Json::array();
  Table t;
  t.header = {"point", "phi", "p_s", "p_e", "p_q", "chi", "zeta"};
  auto add = [&](const char* name, std::optional<double> phi) {
    Json r;
    r["point"] = name;
    r["phi"] = jnum(phi);
    if (!phi) {
      for (const char* k : {"p_s", "p_e", "p_q", "chi", "zeta"}) r[k] = nullptr;
      t.rows.push_back({name, "", "", "", "", "", ""});
    } else {
      const OutcomeProbs p = probs_closed(sp, *phi);
      const auto m = safe_metrics(p);
      r["p_s"] = jnum(p.p_s);
      r["p_e"] = jnum(p.p_e);
      r["p_q"] = jnum(p.p_q);
      r["chi"] = m ? jnum(m->chi) : Json(nullptr);
      r["zeta"] = m ? jnum(m->zeta) : Json(nullptr);
      t.rows.push_back({name, fmt(*phi), fmt(p.p_s), fmt(p.p_e), fmt(p.p_q), m ? fmt(m->chi) : "",
                        m ? fmt(m->zeta) : ""});
    }
    rows.push_back(r);
  };
  auto try_root = [&](double (*f)(const SignalPair&)) -> std::optional<double> {
    try {
      return f(sp);
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  };
  add("med", sp.phi_max());
  add("idp", 0.0);
  add("ctp", try_root(&find_ctp));
  add("erp", try_root(&find_erp));
  d.json["points"] = rows;
  d.table = std::move(t);
  return d;
}

inline Document cmd_sweep(const RunConfig& cfg, bool& any_positive) {
  const SignalPair sp = parse_theta(cfg);
  cfg.fk.validate();
  GridSpec g{0.0, sp.phi_max(), 101};
  if (!cfg.grid.empty()) g = parse_grid(cfg.grid, cfg.degrees);
  if (g.start < -1e-12 || g.stop > sp.phi_max() + 1e-12) {
    throw UsageError("phi grid must lie within [0, " + fmt(sp.phi_max()) + "]");
  }
  const std::vector<double> grid = linspace(g.start, g.stop, g.count);

  Document d;
  d.default_format = Format::csv;
  d.json = header_json("sweep");
  d.json["theta"] = sp.theta();
  d.json["params"] = params_json(cfg.fk);
  d.json["b92_secure_rate"] = jnum(b92_secure_rate(sp, cfg.fk));
  Json rows = Json::array();
  Table t;
  t.header = {"phi",   "p_s",     "p_e",          "p_q",      "eta",        "qber",    "delta",
              "q_worst", "r_asymptotic", "r_finite", "key_length", "r_secure", "positive"};
  any_positive = false;
  for (double phi : grid) {
    phi = std::clamp(phi, 0.0, sp.phi_max());
    const KeyRateReport r = evaluate(sp, phi, cfg.fk);
    any_positive |= r.positive.secure;
    Json j;
    j["phi"] = jnum(phi);
    j["p_s"] = jnum(r.probs.p_s);
    j["p_e"] = jnum(r.probs.p_e);
    j["p_q"] = jnum(r.probs.p_q);
    j["eta"] = jnum(r.eta);
    j["qber"] = jnum(r.qber);
    j["h_qber"] = jnum(r.h_qber);
    j["delta"] = jnum(r.delta);
    j["q_worst"] = jnum(r.q_worst);
    j["h_qworst"] = jnum(r.h_qworst);
    j["r_asymptotic"] = jnum(r.r_asymptotic);
    j["r_finite"] = jnum(r.r_finite);
    j["key_length"] = jnum(r.key_length);
    j["r_secure"] = jnum(r.r_secure);
    j["positive"] = r.positive.secure;
    rows.push_back(j);
    t.rows.push_back({fmt(phi), fmt(r.probs.p_s), fmt(r.probs.p_e), fmt(r.probs.p_q), fmt(r.eta), fmt(r.qber),
                      fmt(r.delta), fmt(r.q_worst), fmt(r.r_asymptotic), fmt(r.r_finite), fmt(r.key_length),
                      fmt(r.r_secure), r.positive.secure ? "1" : "0"});
  }
  d.json["rows"] = rows;
  d.table = std::move(t);
  return d;
}

inline Document cmd_optimize(const RunConfig& cfg, bool& positive) {
  const SignalPair sp = parse_theta(cfg);
  RateMode mode;
  try {
    mode = parse_rate_mode(cfg.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const OptimumResult opt = optimize_phi(sp, mode, cfg.fk);
  const double b92 = b92_secure_rate(sp, cfg.fk);
  const BoundAnalysis bound = analyze_bound(sp, cfg.fk, optimize_phi(sp, RateMode::composable, cfg.fk));
  positive = opt.rate > 0.0;

  Document d;
  d.json = header_json("optimize");
  d.json["mode"] = std::string(to_string(mode));
  d.json["theta"] = sp.theta();
  d.json["params"] = params_json(cfg.fk);
  d.json["phi_opt"] = jnum(opt.phi_opt);
  d.json["rate"] = jnum(opt.rate);
  d.json["probs"] = probs_json(opt.report.probs);
  d.json["eta"] = jnum(opt.report.eta);
  d.json["qber"] = jnum(opt.report.qber);
  d.json["q_worst"] = jnum(opt.report.q_worst);
  d.json["r_asymptotic"] = jnum(opt.report.r_asymptotic);
  d.json["r_finite"] = jnum(opt.report.r_finite);
  d.json["key_length"] = jnum(opt.report.key_length);
  d.json["r_secure"] = jnum(opt.report.r_secure);
  d.json["r_b92"] = jnum(b92);
  d.json["phi_bound"] = jnum(bound.phi_bound);
  d.json["coverage"] = jnum(bound.coverage);

  Table t;
  t.header = {"mode",     "theta",    "phi_opt",    "rate",     "eta",   "qber",      "q_worst",
              "r_asymptotic", "r_finite", "key_length", "r_secure", "r_b92", "phi_bound", "coverage"};
  t.rows.push_back({std::string(to_string(mode)), fmt(sp.theta()), fmt(opt.phi_opt), fmt(opt.rate),
                    fmt(opt.report.eta), fmt(opt.report.qber), fmt(opt.report.q_worst),
                    fmt(opt.report.r_asymptotic), fmt(opt.report.r_finite), fmt(opt.report.key_length),
                    fmt(opt.report.r_secure), fmt(b92), bound.phi_bound ? fmt(*bound.phi_bound) : "",
                    fmt(bound.coverage)});
  d.table = std::move(t);
  return d;
}

inline Document cmd_simulate(const RunConfig& cfg, bool& positive) {
  const SignalPair sp = parse_theta(cfg);
  SimulationConfig sc;
  sc.theta = sp.theta();
  sc.phi = parse_phi(cfg, sp);
  sc.fk = cfg.fk;
  sc.seed = cfg.seed;
  sc.threads = cfg.threads;
  const SimulationSummary s = run_protocol(sc);
  positive = s.key_extracted;

  Document d;
  d.json = header_json("simulate");
  d.json["theta"] = sp.theta();
  d.json["phi"] = sc.phi;
  d.json["seed"] = sc.seed;
  d.json["params"] = params_json(cfg.fk);
  d.json["key_extracted"] = s.key_extracted;
  d.json["failure"] = s.failure.empty() ? Json(nullptr) : Json(s.failure);
  d.json["low_sift_warning"] = s.low_sift_warning;
  d.json["counts"] = {{"correct", s.counts.correct},
                      {"incorrect", s.counts.incorrect},
                      {"inconclusive", s.counts.inconclusive}};
  d.json["n_sifted"] = s.n_sifted;
  d.json["test_errors"] = s.test_errors;
  d.json["q_hat"] = jnum(s.q_hat);
  d.json["delta"] = jnum(s.delta);
  d.json["q_worst_hat"] = jnum(s.q_worst_hat);
  d.json["q_worst_clamped"] = s.q_worst_clamped;
  d.json["key_length_hat"] = jnum(s.key_length_hat);
  d.json["r_secure_hat"] = jnum(s.r_secure_hat);
  d.json["r_secure_analytic"] = jnum(secure_rate(sp, sc.phi, cfg.fk));

  Table t;
  t.header = {"theta",   "phi",   "seed",        "correct",     "incorrect",      "inconclusive",  "n_sifted",
              "test_errors", "q_hat", "q_worst_hat", "key_length_hat", "r_secure_hat", "key_extracted"};
  t.rows.push_back({fmt(sp.theta()), fmt(sc.phi), std::to_string(sc.seed), std::to_string(s.counts.correct),
                    std::to_string(s.counts.incorrect), std::to_string(s.counts.inconclusive),
                    std::to_string(s.n_sifted), std::to_string(s.test_errors), fmt(s.q_hat), fmt(s.q_worst_hat),
                    fmt(s.key_length_hat), fmt(s.r_secure_hat), s.key_extracted ? "1" : "0"});
  d.table = std::move(t);
  return d;
}

inline Document cmd_compare_b92(const RunConfig& cfg, bool& any_positive) {
  cfg.fk.validate();
  GridSpec g{0.01, kHalfPi, 600};
  if (!cfg.theta_grid.empty()) g = parse_grid(cfg.theta_grid, cfg.degrees);
  if (!(g.start > 0.0) || g.stop > kHalfPi + 1e-12) throw UsageError("theta grid must lie within (0, pi/2]");
  const std::vector<double> grid = linspace(g.start, std::min(g.stop, kHalfPi), g.count);
  const std::vector<ThetaSweepRow> rows = theta_sweep(grid, cfg.fk, cfg.threads);
  const SweepLandmarks lm = summarize_sweep(rows);

  Document d;
  d.default_format = Format::csv;
  d.json = header_json("compare-b92");
  d.json["params"] = params_json(cfg.fk);
  Json jr = Json::array();
  Table t;
  t.header = {"theta", "phi_opt", "r_phiqkd", "r_b92", "difference", "improvement", "phi_bound", "coverage"};
  any_positive = false;
  for (const auto& r : rows) {
    any_positive |= r.r_phiqkd > 0.0;
    Json j;
    j["theta"] = jnum(r.theta);
    j["phi_opt"] = jnum(r.phi_opt);
    j["r_phiqkd"] = jnum(r.r_phiqkd);
    j["r_b92"] = jnum(r.r_b92);
    j["difference"] = jnum(r.difference);
    j["improvement"] = jnum(r.improvement);
    j["phi_bound"] = jnum(r.phi_bound);
    j["coverage"] = jnum(r.coverage);
    jr.push_back(j);
    t.rows.push_back({fmt(r.theta), fmt(r.phi_opt), fmt(r.r_phiqkd), fmt(r.r_b92), fmt(r.difference),
                      r.improvement ? fmt(*r.improvement) : "", r.phi_bound ? fmt(*r.phi_bound) : "",
                      fmt(r.coverage)});
  }
  d.json["rows"] = jr;
  Json l;
  l["saturation_theta"] = jnum(lm.saturation_theta);
  l["max_difference"] = jnum(lm.max_difference);
  l["max_difference_theta"] = jnum(lm.max_difference_theta);
  l["max_phi_opt"] = jnum(lm.max_phi_opt);
  l["max_phi_opt_theta"] = jnum(lm.max_phi_opt_theta);
  l["peak_improvement"] = jnum(lm.peak_improvement);
  l["peak_improvement_theta"] = lm.peak_improvement ? jnum(lm.peak_improvement_theta) : Json(nullptr);
  l["max_improvement"] = jnum(lm.max_improvement);
  l["max_improvement_theta"] = lm.max_improvement ? jnum(lm.max_improvement_theta) : Json(nullptr);
  d.json["landmarks"] = l;
  d.table = std::move(t);
  return d;
}

inline Document cmd_histogram(const RunConfig& cfg) {
  const SignalPair sp = parse_theta(cfg);
  SimulationConfig sc;
  sc.theta = sp.theta();
  sc.phi = parse_phi(cfg, sp);
  sc.seed = cfg.seed;
  sc.threads = cfg.threads;
  sc.shots = cfg.long_mode ? kLongShots : cfg.shots;
  if (sc.shots == 0) throw UsageError("shots must be positive");
  const HistogramCounts h = dilation_histogram(sc);
  const OutcomeProbs p = probs_closed(sp, sc.phi);

  Document d;
  d.json = header_json("histogram");
  d.json["theta"] = sp.theta();
  d.json["phi"] = sc.phi;
  d.json["seed"] = sc.seed;
  d.json["shots"] = sc.shots;
  Json bins = Json::array();
  Table t;
  t.header = {"label", "outcome", "count", "frequency", "expected"};
  const double n = static_cast<double>(sc.shots);
  auto add = [&](const char* label, const char* outcome, std::uint64_t count, double expected) {
    Json b;
    b["label"] = label;
    b["outcome"] = outcome;
    b["count"] = count;
    b["frequency"] = jnum(static_cast<double>(count) / n);
    b["expected"] = jnum(expected);
    bins.push_back(b);
    t.rows.push_back({label, outcome, std::to_string(count), fmt(static_cast<double>(count) / n), fmt(expected)});
  };
  add("00", "correct", h.correct, p.p_s);
  add("01", "incorrect", h.incorrect, p.p_e);
  add("10", "inconclusive", h.inconclusive, p.p_q);
  add("11", "unused", h.unused, 0.0);
  d.json["bins"] = bins;
  d.table = std::move(t);
  return d;
}

// ---------------------------------------------------------------- front end

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Reads key=value lines; blank lines and lines starting with '#' are skipped.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || trim(t.substr(0, eq)).empty()) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

inline std::uint64_t parse_seed(const std::string& s, const char* source) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError(std::string("invalid seed from ") + source + ": '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw UsageError(std::string("seed out of range from ") + source + ": '" + s + "'");
  }
}

inline void add_budget_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--N", cfg.fk.total_signals, "Total signals N")->capture_default_str();
  sub->add_option("--n", cfg.fk.test_bits, "Parameter-estimation bits n")->capture_default_str();
  sub->add_option("--eps-pe", cfg.fk.eps_pe, "Parameter-estimation failure probability")->capture_default_str();
  sub->add_option("--eps-sec", cfg.fk.eps_sec, "Secrecy parameter")->capture_default_str();
  sub->add_option("--eps-cor", cfg.fk.eps_cor, "Correctness parameter")->capture_default_str();
  sub->add_option("--f", cfg.fk.ec_efficiency, "Error-correction efficiency")->capture_default_str();
}

inline void add_common_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  sub->add_option("--output,-o", cfg.output, "Write output to this file instead of stdout");
  sub->add_flag("--degrees", cfg.degrees, "Read angle arguments in degrees");
  sub->add_option("--config", "key=value file whose entries act as default flags");
}

inline void add_theta(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--theta", cfg.theta, "Overlap angle theta, radians unless --degrees (default pi/4)");
}

inline void add_phi(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--phi", cfg.phi, "Tilt angle, or one of idp, med, ctp, erp")->capture_default_str();
}

inline void add_seed(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "RNG seed (default from PHIQKD_SEED, else 1)");
  sub->add_option("--threads", cfg.threads, "Worker threads, 0 for all cores (results do not depend on it)");
}

inline void add_require_positive(CLI::App* sub, RunConfig& cfg) {
  sub->add_flag("--require-positive", cfg.require_positive, "Exit with status 1 when no positive key results");
}

inline void emit(const Document& d, Format f, std::ostream& os) {
  switch (f) {
    case Format::json: os << d.json.dump(2) << '\n'; break;
    case Format::csv: write_csv(os, *d.table); break;
    case Format::text:
      if (d.default_format == Format::csv) {
        write_aligned(os, *d.table);
      } else {
        write_text_record(os, d.json);
      }
      break;
  }
}

/// Runs one command line (without the program name). Returns the exit status.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err,
                   const std::optional<std::string>& env_seed = std::nullopt) {
  RunConfig cfg;
  CLI::App app{"phiQKD: tilted-POVM state discrimination and finite-key rates"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  CLI::App* povm = app.add_subcommand("povm", "Print the tilted POVM, outcome probabilities and metrics");
  add_theta(povm, cfg);
  add_phi(povm, cfg);
  add_common_options(povm, cfg);

  CLI::App* points = app.add_subcommand("points", "Accuracy and efficiency at the MED, IDP, CTP and ERP points");
  add_theta(points, cfg);
  add_common_options(points, cfg);

  CLI::App* sweep = app.add_subcommand("sweep", "Probabilities and key rates across a tilt grid");
  add_theta(sweep, cfg);
  sweep->add_option("--grid", cfg.grid, "Tilt grid start:stop:count (default 0:phi_med:101)");
  add_budget_options(sweep, cfg);
  add_require_positive(sweep, cfg);
  add_common_options(sweep, cfg);

  CLI::App* optimize = app.add_subcommand("optimize", "Optimal tilt for one rate");
  add_theta(optimize, cfg);
  optimize->add_option("--mode", cfg.mode, "asymptotic, finite or composable")->capture_default_str();
  add_budget_options(optimize, cfg);
  add_require_positive(optimize, cfg);
  add_common_options(optimize, cfg);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo run of the protocol");
  add_theta(simulate, cfg);
  add_phi(simulate, cfg);
  add_budget_options(simulate, cfg);
  add_seed(simulate, cfg);
  add_require_positive(simulate, cfg);
  add_common_options(simulate, cfg);

  CLI::App* compare = app.add_subcommand("compare-b92", "Optimized phiQKD against B92 across theta");
  compare->add_option("--theta-grid", cfg.theta_grid, "Theta grid start:stop:count (default 0.01:pi/2:600)");
  compare->add_option("--threads", cfg.threads, "Worker threads, 0 for all cores");
  add_budget_options(compare, cfg);
  add_require_positive(compare, cfg);
  add_common_options(compare, cfg);

  CLI::App* histogram = app.add_subcommand("histogram", "Readout histogram of the dilated measurement");
  add_theta(histogram, cfg);
  add_phi(histogram, cfg);
  add_seed(histogram, cfg);
  histogram->add_option("--shots", cfg.shots, "Number of shots")->capture_default_str();
  histogram->add_flag("--long", cfg.long_mode, "Use 1e8 shots");
  add_common_options(histogram, cfg);

  try {
    // Strip --config and splice its entries in right after the subcommand.
    std::optional<std::string> config_path;
    for (std::size_t i = 0; i < args.size();) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) throw UsageError("--config needs a path");
        config_path = args[i + 1];
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      } else if (args[i].rfind("--config=", 0) == 0) {
        config_path = args[i].substr(9);
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
    if (config_path) {
      const auto entries = read_config_file(*config_path);
      auto sub_it = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
        return app.get_subcommand_no_throw(a) != nullptr;
      });
      if (sub_it == args.end()) throw UsageError("--config needs a command");
      CLI::App* sub = app.get_subcommand(*sub_it);
      std::vector<std::string> expanded;
      for (const auto& [key, value] : entries) {
        bool known = false;
        for (CLI::App* s : app.get_subcommands({})) known |= s->get_option_no_throw("--" + key) != nullptr;
        if (!known) throw UsageError("unknown config key: " + key);
        if (sub->get_option_no_throw("--" + key) != nullptr) expanded.push_back("--" + key + "=" + value);
      }
      args.insert(sub_it + 1, expanded.begin(), expanded.end());
    }
    if (env_seed) cfg.seed = parse_seed(*env_seed, "PHIQKD_SEED");

    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == static_cast<int>(CLI::ExitCodes::Success) ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    Document doc;
    bool positive = true;
    if (povm->parsed()) {
      doc = cmd_povm(cfg);
    } else if (points->parsed()) {
      doc = cmd_points(cfg);
    } else if (sweep->parsed()) {
      doc = cmd_sweep(cfg, positive);
    } else if (optimize->parsed()) {
      doc = cmd_optimize(cfg, positive);
    } else if (simulate->parsed()) {
      doc = cmd_simulate(cfg, positive);
    } else if (compare->parsed()) {
      doc = cmd_compare_b92(cfg, positive);
    } else {
      doc = cmd_histogram(cfg);
    }

    Format f = doc.default_format;
    if (cfg.format == "text") f = Format::text;
    if (cfg.format == "csv") f = Format::csv;
    if (cfg.format == "json") f = Format::json;

    if (cfg.output.empty()) {
      emit(doc, f, out);
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) throw UsageError("cannot open output file: " + cfg.output);
      emit(doc, f, file);
    }
    if (cfg.require_positive && !positive) {
      err << "no positive key\n";
      return kExitNoKey;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace phiqkd::cli

#endif  // PHIQKD_TOOLS_CLI_HPP
