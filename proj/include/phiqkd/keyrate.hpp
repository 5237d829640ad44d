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

// Key-rate figures of merit for phiQKD and the B92 baseline.
//
// All rates are in bits per emitted signal. Negative rates are returned as-is;
// positivity is reported separately so sweeps can keep the full curves.

#ifndef PHIQKD_KEYRATE_HPP
#define PHIQKD_KEYRATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "phiqkd/gsd.hpp"

namespace phiqkd {

/// Finite-key security budget. Defaults are the standard evaluation point.
struct FiniteKeyParams {
  std::uint64_t total_signals = 1'000'000;  // N
  std::uint64_t test_bits = 100'000;        // n, bits spent on parameter estimation
  double eps_pe = 1e-10;
  double eps_sec = 1e-10;
  double eps_cor = 1e-10;
  double ec_efficiency = 1.15;  // f

  void validate() const {
    auto in_unit = [](double e) { return e > 0.0 && e < 1.0; };
    if (!(test_bits > 0 && test_bits < total_signals)) {
      throw std::invalid_argument("FiniteKeyParams: need 0 < n < N");
    }
    if (!in_unit(eps_pe) || !in_unit(eps_sec) || !in_unit(eps_cor)) {
      throw std::invalid_argument("FiniteKeyParams: epsilons must lie in (0, 1)");
    }
    if (!(ec_efficiency >= 1.0)) {
      throw std::invalid_argument("FiniteKeyParams: error-correction efficiency must be >= 1");
    }
  }
};

/// Shannon binary entropy in bits; H(0) = H(1) = 0.
inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("binary_entropy: argument outside [0, 1]: " + std::to_string(x));
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// Error rate among conclusive outcomes.
inline double qber(const OutcomeProbs& p) {
  const double eta = 1.0 - p.p_q;
  if (!(eta > 0.0)) {
    throw std::domain_error("qber: no conclusive outcomes");
  }
  return p.p_e / eta;
}

/// Preparation quality log2(1/c) as used in the rate formulas. The orthogonal
/// pair (c = 0) is pinned to one bit per signal.
inline double source_bits(const SignalPair& sp) { return sp.orthogonal_pair() ? 1.0 : sp.q(); }

/// Hoeffding half-width for n samples at failure probability eps_pe.
inline double hoeffding_delta(std::uint64_t n, double eps_pe) {
  if (n == 0) throw std::invalid_argument("hoeffding_delta: n must be positive");
  return std::sqrt(std::log(2.0 / eps_pe) / (2.0 * static_cast<double>(n)));
}

/// Q + delta, clamped to 1/2.
inline double worst_case_qber(double q, double delta) { return std::min(q + delta, 0.5); }

/// log2(2 / (eps_sec^2 eps_cor)).
inline double security_penalty(const FiniteKeyParams& fk) {
  return std::log2(2.0) - 2.0 * std::log2(fk.eps_sec) - std::log2(fk.eps_cor);
}

/// Composable key length for `remaining` sifted, non-test bits:
/// remaining (q - H(Qw)) - remaining f H(Qw) - penalty.
inline double key_length_for(double remaining, double q_bits, double q_worst, const FiniteKeyParams& fk) {
  const double h = binary_entropy(q_worst);
  return remaining * (q_bits - h) - remaining * fk.ec_efficiency * h - security_penalty(fk);
}

/// Devetak-Winter rate with the entropic-uncertainty bound on Eve:
/// eta (q - 2 H(Q)).
inline double asymptotic_rate(const SignalPair& sp, double phi) {
  const OutcomeProbs p = probs_closed(sp, phi);
  const double eta = p.p_s + p.p_e;
  return eta * (source_bits(sp) - 2.0 * binary_entropy(qber(p)));
}

/// Hoeffding-corrected rate (eta - n/N)(q - 2 H(Q_worst)); the leading factor
/// is floored at zero once the test bits exhaust the sifted key.
inline double finite_rate(const SignalPair& sp, double phi, const FiniteKeyParams& fk) {
  fk.validate();
  const OutcomeProbs p = probs_closed(sp, phi);
  const double eta = p.p_s + p.p_e;
  const double qw = worst_case_qber(qber(p), hoeffding_delta(fk.test_bits, fk.eps_pe));
  const double usable = std::max(eta - static_cast<double>(fk.test_bits) / static_cast<double>(fk.total_signals), 0.0);
  return usable * (source_bits(sp) - 2.0 * binary_entropy(qw));
}

namespace detail {

inline double composable_length(const SignalPair& sp, double eta, double q, const FiniteKeyParams& fk) {
  fk.validate();
  const double sifted = eta * static_cast<double>(fk.total_signals);
  const double remaining = std::max(sifted - static_cast<double>(fk.test_bits), 0.0);
  const double qw = worst_case_qber(q, hoeffding_delta(fk.test_bits, fk.eps_pe));
  return key_length_for(remaining, source_bits(sp), qw, fk);
}

}  // namespace detail

/// Real-valued composable key length (no flooring).
inline double composable_key_length(const SignalPair& sp, double phi, const FiniteKeyParams& fk) {
  const OutcomeProbs p = probs_closed(sp, phi);
  return detail::composable_length(sp, p.p_s + p.p_e, qber(p), fk);
}

inline double secure_rate(const SignalPair& sp, double phi, const FiniteKeyParams& fk) {
  return composable_key_length(sp, phi, fk) / static_cast<double>(fk.total_signals);
}

/// B92 under the same finite-key budget: IDP sifting 1 - cos(theta), no errors.
inline double b92_secure_rate(const SignalPair& sp, const FiniteKeyParams& fk) {
  const double eta = sp.orthogonal_pair() ? 1.0 : 1.0 - std::cos(sp.theta());
  return detail::composable_length(sp, eta, 0.0, fk) / static_cast<double>(fk.total_signals);
}

struct RatePositivity {
  bool asymptotic = false;
  bool finite = false;
  bool secure = false;
};

/// Everything computed at one (theta, phi) operating point.
struct KeyRateReport {
  double theta = 0.0;
  double phi = 0.0;
  OutcomeProbs probs{};
  double eta = 0.0;
  double qber = 0.0;
  double delta = 0.0;
  double q_worst = 0.0;
  bool q_worst_clamped = false;
  double h_qber = 0.0;
  double h_qworst = 0.0;
  double r_asymptotic = 0.0;
  double r_finite = 0.0;
  double key_length = 0.0;
  double r_secure = 0.0;
  RatePositivity positive;
};

inline KeyRateReport evaluate(const SignalPair& sp, double phi, const FiniteKeyParams& fk) {
  fk.validate();
  KeyRateReport r;
  r.theta = sp.theta();
  r.phi = phi;
  r.probs = probs_closed(sp, phi);
  r.eta = r.probs.p_s + r.probs.p_e;
  r.qber = qber(r.probs);
  r.delta = hoeffding_delta(fk.test_bits, fk.eps_pe);
  r.q_worst = worst_case_qber(r.qber, r.delta);
  r.q_worst_clamped = r.qber + r.delta > 0.5;
  r.h_qber = binary_entropy(r.qber);
  r.h_qworst = binary_entropy(r.q_worst);
  r.r_asymptotic = asymptotic_rate(sp, phi);
  r.r_finite = finite_rate(sp, phi, fk);
  r.key_length = composable_key_length(sp, phi, fk);
  r.r_secure = r.key_length / static_cast<double>(fk.total_signals);
  r.positive = {r.r_asymptotic > 0.0, r.r_finite > 0.0, r.r_secure > 0.0};
  return r;
}

}  // namespace phiqkd

#endif  // PHIQKD_KEYRATE_HPP
