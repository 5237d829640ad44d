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

#ifndef PHIQKD_OPTIMIZER_HPP
#define PHIQKD_OPTIMIZER_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "phiqkd/keyrate.hpp"
#include "phiqkd/parallel.hpp"
#include "phiqkd/scalar_search.hpp"

namespace phiqkd {

enum class RateMode { asymptotic, finite, composable };

inline std::string_view to_string(RateMode m) {
  switch (m) {
    case RateMode::asymptotic: return "asymptotic";
    case RateMode::finite: return "finite";
    case RateMode::composable: return "composable";
  }
  return "unknown";
}

inline RateMode parse_rate_mode(std::string_view s) {
  if (s == "asymptotic") return RateMode::asymptotic;
  if (s == "finite") return RateMode::finite;
  if (s == "composable" || s == "secure") return RateMode::composable;
  throw std::invalid_argument("unknown rate mode: " + std::string(s));
}

inline double mode_rate(RateMode mode, const SignalPair& sp, double phi, const FiniteKeyParams& fk) {
  switch (mode) {
    case RateMode::asymptotic: return asymptotic_rate(sp, phi);
    case RateMode::finite: return finite_rate(sp, phi, fk);
    case RateMode::composable: return secure_rate(sp, phi, fk);
  }
  throw std::logic_error("mode_rate: bad mode");
}

inline constexpr std::size_t kCoarseGridPoints = 2048;
inline constexpr double kRefineTolerance = 1e-7;

struct OptimumResult {
  RateMode mode;
  double theta;
  double phi_opt;
  double rate;
  KeyRateReport report;
};

/// Uniform grid of `points` values from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
  std::vector<double> v(points);
  if (points == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < points; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  v.back() = hi;
  return v;
}

/// Global maximizer of the mode's rate over [0, phi_med]: coarse scan, then
/// golden-section refinement between the neighbours of the best grid point.
inline OptimumResult optimize_phi(const SignalPair& sp, RateMode mode, const FiniteKeyParams& fk) {
  fk.validate();
  const double phi_max = sp.phi_max();
  auto rate = [&](double phi) { return mode_rate(mode, sp, phi, fk); };

  double best_phi = 0.0;
  double best_rate = rate(0.0);
  if (phi_max > 0.0) {
    const std::vector<double> grid = linspace(0.0, phi_max, kCoarseGridPoints);
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double r = rate(grid[i]);
      if (r > best_rate) {
        best_rate = r;
        best = i;
      }
    }
    best_phi = grid[best];
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    const ScalarOptimum refined = golden_section_maximize(rate, lo, hi, kRefineTolerance);
    if (refined.value > best_rate) {
      best_rate = refined.value;
      best_phi = refined.x;
    }
  }
  return {mode, sp.theta(), best_phi, rate(best_phi), evaluate(sp, best_phi, fk)};
}

struct BoundAnalysis {
  std::optional<double> phi_bound;
  double coverage;  // percent of [0, phi_med] where phiQKD beats B92
};

/// Locates where the composable rate falls back to the B92 rate past the
/// optimum. Conventions: a degenerate domain or a curve that never falls back
/// gives 100% coverage; a curve that never rises above B92 gives 0%.
inline BoundAnalysis analyze_bound(const SignalPair& sp, const FiniteKeyParams& fk, const OptimumResult& opt) {
  const double phi_max = sp.phi_max();
  if (phi_max <= 0.0) return {std::nullopt, 100.0};
  const double b92 = b92_secure_rate(sp, fk);
  auto excess = [&](double phi) { return secure_rate(sp, phi, fk) - b92; };
  if (!(excess(opt.phi_opt) > 1e-12)) return {std::nullopt, 0.0};

  const std::vector<double> grid = linspace(opt.phi_opt, phi_max, kCoarseGridPoints);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (excess(grid[i]) < 0.0) {
      const double root = bisect_root(excess, grid[i - 1], grid[i]);
      return {root, 100.0 * root / phi_max};
    }
  }
  return {std::nullopt, 100.0};
}

inline std::optional<double> phi_bound(const SignalPair& sp, const FiniteKeyParams& fk) {
  return analyze_bound(sp, fk, optimize_phi(sp, RateMode::composable, fk)).phi_bound;
}

inline double coverage(const SignalPair& sp, const FiniteKeyParams& fk) {
  return analyze_bound(sp, fk, optimize_phi(sp, RateMode::composable, fk)).coverage;
}

/// B92 rates below this are too small for a meaningful relative improvement.
inline constexpr double kImprovementFloor = 0.001;

struct ThetaSweepRow {
  double theta = 0.0;
  double phi_opt = 0.0;
  double r_phiqkd = 0.0;
  double r_b92 = 0.0;
  double difference = 0.0;
  std::optional<double> improvement;  // percent
  std::optional<double> phi_bound;
  double coverage = 0.0;
};

inline ThetaSweepRow sweep_row(double theta, const FiniteKeyParams& fk) {
  const SignalPair sp(theta);
  const OptimumResult opt = optimize_phi(sp, RateMode::composable, fk);
  const BoundAnalysis bound = analyze_bound(sp, fk, opt);
  ThetaSweepRow row;
  row.theta = sp.theta();
  row.phi_opt = opt.phi_opt;
  row.r_phiqkd = opt.rate;
  row.r_b92 = b92_secure_rate(sp, fk);
  row.difference = row.r_phiqkd - row.r_b92;
  if (row.r_b92 >= kImprovementFloor) row.improvement = 100.0 * row.difference / row.r_b92;
  row.phi_bound = bound.phi_bound;
  row.coverage = bound.coverage;
  return row;
}

/// Rows are independent; output order follows `grid` for any thread count.
inline std::vector<ThetaSweepRow> theta_sweep(std::span<const double> grid, const FiniteKeyParams& fk,
                                              unsigned threads = 0) {
  fk.validate();
  std::vector<ThetaSweepRow> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) { rows[i] = sweep_row(grid[i], fk); });
  return rows;
}

inline std::vector<double> default_theta_grid(std::size_t points = 600) {
  return linspace(0.01, kHalfPi, points);
}

struct SweepLandmarks {
  std::optional<double> saturation_theta;  // coverage stays at 100% from here on
  double max_difference = 0.0;
  double max_difference_theta = 0.0;
  double max_phi_opt = 0.0;
  double max_phi_opt_theta = 0.0;
  // Highest interior local peak of the improvement curve. The curve also
  // climbs steeply at the low-theta edge of the improvement filter, where the
  // rates themselves are tiny; that edge value is reported separately.
  std::optional<double> peak_improvement;
  double peak_improvement_theta = 0.0;
  std::optional<double> max_improvement;
  double max_improvement_theta = 0.0;
};

inline SweepLandmarks summarize_sweep(std::span<const ThetaSweepRow> rows) {
  SweepLandmarks lm;
  if (rows.empty()) return lm;

  std::size_t sat = rows.size();
  while (sat > 0 && rows[sat - 1].coverage >= 100.0 - 1e-9) --sat;
  if (sat < rows.size()) lm.saturation_theta = rows[sat].theta;

  lm.max_difference = rows[0].difference;
  lm.max_difference_theta = rows[0].theta;
  lm.max_phi_opt = rows[0].phi_opt;
  lm.max_phi_opt_theta = rows[0].theta;
  for (const auto& r : rows) {
    if (r.difference > lm.max_difference) {
      lm.max_difference = r.difference;
      lm.max_difference_theta = r.theta;
    }
    if (r.phi_opt > lm.max_phi_opt) {
      lm.max_phi_opt = r.phi_opt;
      lm.max_phi_opt_theta = r.theta;
    }
    if (r.improvement && (!lm.max_improvement || *r.improvement > *lm.max_improvement)) {
      lm.max_improvement = r.improvement;
      lm.max_improvement_theta = r.theta;
    }
  }

  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const auto& prev = rows[i - 1].improvement;
    const auto& cur = rows[i].improvement;
    const auto& next = rows[i + 1].improvement;
    if (!prev || !cur || !next) continue;
    if (*cur >= *prev && *cur >= *next && (!lm.peak_improvement || *cur > *lm.peak_improvement)) {
      lm.peak_improvement = cur;
      lm.peak_improvement_theta = rows[i].theta;
    }
  }
  return lm;
}

}  // namespace phiqkd

#endif  // PHIQKD_OPTIMIZER_HPP
