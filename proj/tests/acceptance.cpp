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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "phiqkd/gsd.hpp"
#include "phiqkd/keyrate.hpp"
#include "phiqkd/optimizer.hpp"
#include "phiqkd/simulator.hpp"

using namespace phiqkd;

namespace {

constexpr double kPi = std::numbers::pi;
const FiniteKeyParams kDefaults{};

/// Collects individual checks; any miss fails the criterion.
class Check {
 public:
  void near(const std::string& what, double got, double want, double tol) {
    const bool ok = std::abs(got - want) <= tol;
    note(ok, what, got, want, tol);
  }
  void truth(const std::string& what, bool ok) {
    if (!ok) {
      pass_ = false;
      misses_ << " " << what << ";";
    }
  }
  bool pass() const { return pass_; }
  std::string detail() const { return pass_ ? summary_.str() : misses_.str(); }

 private:
  void note(bool ok, const std::string& what, double got, double want, double tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, " %s=%.6f (want %.6f +/- %.1e)", what.c_str(), got, want, tol);
    if (!ok) {
      pass_ = false;
      misses_ << buf << ";";
    }
    if (summary_.tellp() < 160) summary_ << " " << what << "=" << got;
  }

  bool pass_ = true;
  std::ostringstream misses_;
  std::ostringstream summary_;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.truth(std::string("exception: ") + e.what(), false);
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!c.pass()) ++failures;
  std::printf("criterion %2d %s: %s [%.1f ms]%s\n", id, c.pass() ? "PASS" : "FAIL", title, ms, c.detail().c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  const SignalPair quarter(kPi / 4);

  criterion(1, "IDP baseline", [&](Check& c) {
    const OutcomeProbs p = probs_closed(quarter, 0.0);
    c.near("p_s", p.p_s, 0.292893, 1e-6);
    c.near("p_e", p.p_e, 0.0, 1e-6);
    c.near("p_q", p.p_q, 0.707107, 1e-6);
  });

  criterion(2, "special points", [&](Check& c) {
    const double ctp = find_ctp(quarter);
    const double erp = find_erp(quarter);
    const OutcomeProbs a = probs_closed(quarter, ctp);
    const OutcomeProbs b = probs_closed(quarter, erp);
    c.near("ctp", ctp, 0.186997, 1e-5);
    c.near("ctp.p_s", a.p_s, 0.487656, 1e-5);
    c.near("ctp.p_q", a.p_q, 0.487656, 1e-5);
    c.near("erp", erp, 0.356915, 1e-5);
    c.near("erp.p_e", b.p_e, 0.113924, 1e-5);
    c.near("erp.p_q", b.p_q, 0.113924, 1e-5);
  });

  criterion(3, "accuracy/efficiency table", [&](Check& c) {
    struct Row {
      const char* name;
      double phi, chi, zeta;
    };
    const Row rows[] = {{"med", quarter.phi_max(), 85.38, 100.00},
                        {"idp", 0.0, 100.00, 29.29},
                        {"ctp", find_ctp(quarter), 95.18, 51.23},
                        {"erp", find_erp(quarter), 87.14, 88.61}};
    for (const Row& r : rows) {
      const DiscriminationMetrics m = metrics(probs_closed(quarter, r.phi));
      c.near(std::string(r.name) + ".chi", m.chi, r.chi, 0.02);
      c.near(std::string(r.name) + ".zeta", m.zeta, r.zeta, 0.02);
    }
  });

  criterion(4, "asymptotic rates", [&](Check& c) {
    c.near("r(0.050389)", asymptotic_rate(quarter, 0.050389), 0.310055, 1e-3);
    c.near("r(ctp)", asymptotic_rate(quarter, find_ctp(quarter)), 0.226816, 1e-3);
    c.near("r(erp)", asymptotic_rate(quarter, find_erp(quarter)), -0.094521, 1e-3);
  });

  criterion(5, "Hoeffding correction", [&](Check& c) {
    c.near("delta", hoeffding_delta(100'000, 1e-10), 0.010890, 1e-6);
  });

  criterion(6, "finite-key rate", [&](Check& c) {
    c.near("r_finite", finite_rate(quarter, 0.083261, kDefaults), 0.188063, 1e-3);
  });

  criterion(7, "composable key length", [&](Check& c) {
    const double ell = composable_key_length(quarter, 0.073953, kDefaults);
    const double rate = secure_rate(quarter, 0.073953, kDefaults);
    const double b92 = b92_secure_rate(quarter, kDefaults);
    c.near("ell", ell, 181958.0, 200.0);
    c.near("r_secure", rate, 0.181958, 2e-4);
    c.near("r_b92", b92, 0.156862, 2e-4);
    c.near("improvement%", 100.0 * (rate - b92) / b92, 16.0, 0.5);
  });

  criterion(8, "optimizer", [&](Check& c) {
    c.near("phi_opt.asym", optimize_phi(quarter, RateMode::asymptotic, kDefaults).phi_opt, 0.050389, 5e-4);
    c.near("phi_opt.finite", optimize_phi(quarter, RateMode::finite, kDefaults).phi_opt, 0.083261, 5e-4);
    const OptimumResult sec = optimize_phi(quarter, RateMode::composable, kDefaults);
    c.near("phi_opt.secure", sec.phi_opt, 0.073953, 5e-4);
    const BoundAnalysis b = analyze_bound(quarter, kDefaults, sec);
    c.truth("phi_bound exists", b.phi_bound.has_value());
    if (b.phi_bound) c.near("phi_bound", *b.phi_bound, 0.149123, 5e-4);
    c.near("coverage", b.coverage, 37.97, 0.2);
  });

  criterion(9, "theta sweep landmarks", [&](Check& c) {
    const auto grid = default_theta_grid(600);
    const auto rows = theta_sweep(grid, kDefaults);
    const SweepLandmarks lm = summarize_sweep(rows);
    c.truth("saturation found", lm.saturation_theta.has_value());
    if (lm.saturation_theta) c.near("saturation", *lm.saturation_theta, 0.938015, 0.01);
    c.near("max_diff", lm.max_difference, 0.781095, 2e-3);
    c.near("max_diff.theta", lm.max_difference_theta, 1.341750, 0.01);
    c.truth("improvement peak found", lm.peak_improvement.has_value());
    if (lm.peak_improvement) {
      c.near("peak_impr%", *lm.peak_improvement, 47.82, 0.5);
      c.near("peak_impr.theta", lm.peak_improvement_theta, 1.119617, 0.01);
    }
    c.near("max_phi_opt", lm.max_phi_opt, 0.274995, 2e-3);
    c.near("phi_opt(pi/2)", rows.back().phi_opt, 0.0, 0.0);
  });

  criterion(10, "property suite", [&](Check& c) {
    std::mt19937_64 gen(10);
    double worst = 0.0;
    bool psd = true;
    for (int i = 0; i < 1000; ++i) {
      const auto [theta, phi] = oracle::random_point(gen);
      const SignalPair sp(theta);
      const TiltedPovm povm = build_povm(sp, phi);
      worst = std::max(worst, povm.completeness_residual());
      for (const Op2* el : {&povm.pi1, &povm.pi2, &povm.pi0}) {
        psd &= oracle::hermitian_eigenvalues(el->m).first >= -1e-12;
        worst = std::max(worst, el->hermiticity_residual());
      }
      const OutcomeProbs a = probs_closed(sp, phi);
      const OutcomeProbs b = probs_operator(sp, povm);
      worst = std::max({worst, std::abs(a.p_s + a.p_e + a.p_q - 1.0), std::abs(a.p_s - b.p_s),
                        std::abs(a.p_e - b.p_e), std::abs(a.p_q - b.p_q),
                        std::abs(inconclusive_squared_bracket(sp, phi) - a.p_q),
                        (povm.pi0 - inconclusive_from_gamma(sp, phi)).max_abs()});
    }
    c.truth("psd", psd);
    c.near("invariant residual", worst, 0.0, 1e-12);

    double helstrom = 0.0;
    for (int i = 0; i < 50; ++i) {
      const SignalPair sp(0.02 + 1.5 * i / 49.0);
      const OutcomeProbs m = probs_closed(sp, sp.phi_max());
      const OutcomeProbs h = helstrom_probs(sp);
      helstrom = std::max({helstrom, std::abs(m.p_s - h.p_s), std::abs(m.p_e - h.p_e), std::abs(m.p_q)});
    }
    c.near("helstrom endpoint", helstrom, 0.0, 1e-12);

    double b92 = 0.0;
    for (int i = 0; i < 50; ++i) {
      const SignalPair sp(0.02 + (kPi / 2 - 0.02) * i / 49.0);
      b92 = std::max(b92, std::abs(secure_rate(sp, 0.0, kDefaults) - b92_secure_rate(sp, kDefaults)));
    }
    c.near("secure(0)-b92", b92, 0.0, 1e-9);
  });

  criterion(11, "simulator", [&](Check& c) {
    SimulationConfig cfg;
    cfg.theta = kPi / 4;
    cfg.phi = 0.073953;
    cfg.seed = 20240611;
    cfg.threads = 1;
    const SimulationSummary s = run_protocol(cfg);
    const OutcomeProbs p = probs_closed(quarter, cfg.phi);
    const double n = static_cast<double>(kDefaults.total_signals);
    auto z = [&](std::uint64_t k, double prob) {
      return std::abs(static_cast<double>(k) - n * prob) / std::sqrt(n * prob * (1.0 - prob));
    };
    c.near("z.correct", z(s.counts.correct, p.p_s), 0.0, 4.0);
    c.near("z.incorrect", z(s.counts.incorrect, p.p_e), 0.0, 4.0);
    c.near("z.inconclusive", z(s.counts.inconclusive, p.p_q), 0.0, 4.0);

    const double remaining = static_cast<double>(s.n_sifted) - static_cast<double>(kDefaults.test_bits);
    const double h = oracle::entropy(s.q_worst_hat);
    const double analytic = remaining * (oracle::q_bits(cfg.theta) - h) - remaining * 1.15 * h -
                            std::log2(2.0 / (1e-10 * 1e-10 * 1e-10));
    c.near("key_length_hat - analytic", s.key_length_hat - analytic, 0.0, 1.0);

    std::mt19937_64 gen(11);
    double dil = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto [theta, phi] = oracle::random_point(gen);
      const SignalPair sp(theta);
      const OutcomeProbs a = dilation_probs(sp, phi);
      const OutcomeProbs b = probs_operator(sp, build_povm(sp, phi));
      dil = std::max({dil, std::abs(a.p_s - b.p_s), std::abs(a.p_e - b.p_e), std::abs(a.p_q - b.p_q)});
    }
    c.near("dilation residual", dil, 0.0, 1e-12);

    for (unsigned t : {2u, 8u}) {
      cfg.threads = t;
      c.truth("identical summary at " + std::to_string(t) + " threads", run_protocol(cfg) == s);
    }
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
