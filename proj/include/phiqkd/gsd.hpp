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

// Generalized state discrimination: the tilted three-outcome POVM family that
// interpolates between unambiguous (IDP, phi = 0) and minimum-error
// (Helstrom, phi = phi_med) discrimination of two pure qubit states.

#ifndef PHIQKD_GSD_HPP
#define PHIQKD_GSD_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "phiqkd/qmath.hpp"
#include "phiqkd/scalar_search.hpp"

namespace phiqkd {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Upper end of the tilt domain: the tilted states become orthogonal there.
inline double phi_med(double theta) { return std::numbers::pi / 4.0 - theta / 2.0; }

/// The signal pair |psi1> = |0>, |psi2> = cos(theta)|0> + sin(theta)|1>.
class SignalPair {
 public:
  explicit SignalPair(double theta) : theta_(theta) {
    if (!(theta > 0.0) || theta > kHalfPi + 1e-12) {
      throw std::domain_error("SignalPair: theta must lie in (0, pi/2], got " + std::to_string(theta));
    }
    if (theta >= kHalfPi - 1e-12) {
      // Orthogonal pair; pin it exactly instead of carrying cos(pi/2) ~ 6e-17.
      theta_ = kHalfPi;
      psi2_ = Ket2(0.0, 1.0);
      c_ = 0.0;
      q_ = std::numeric_limits<double>::infinity();
    } else {
      psi2_ = Ket2::from_angle(theta);
      const double co = std::cos(theta);
      c_ = co * co;
      q_ = std::log2(1.0 / c_);
    }
  }

  double theta() const { return theta_; }
  const Ket2& psi1() const { return psi1_; }
  const Ket2& psi2() const { return psi2_; }
  /// |<psi1|psi2>|^2
  double c() const { return c_; }
  /// log2(1/c) in bits; +infinity for the orthogonal pair.
  double q() const { return q_; }
  double phi_max() const { return theta_ == kHalfPi ? 0.0 : phi_med(theta_); }
  bool orthogonal_pair() const { return c_ == 0.0; }

 private:
  double theta_;
  Ket2 psi1_{1.0, 0.0};
  Ket2 psi2_;
  double c_;
  double q_;
};

/// Throws std::domain_error unless 0 <= phi <= phi_med(theta) (1e-12 slack).
inline void require_tilt(const SignalPair& sp, double phi) {
  if (!(phi >= -1e-12) || phi > sp.phi_max() + 1e-12) {
    throw std::domain_error("tilt angle " + std::to_string(phi) + " outside [0, " +
                            std::to_string(sp.phi_max()) + "]");
  }
}

struct TiltedPovm {
  Op2 pi1;  // identifies psi1
  Op2 pi2;  // identifies psi2
  Op2 pi0;  // inconclusive

  double completeness_residual() const { return (pi1 + pi2 + pi0 - Op2::identity()).max_abs(); }
};

struct OutcomeProbs {
  double p_s;  // correct
  double p_e;  // incorrect
  double p_q;  // inconclusive
};

struct DiscriminationMetrics {
  double chi;   // accuracy, percent
  double zeta;  // efficiency, percent
};

/// psi1 rotated by -phi and psi2 by +phi in the real plane; the tilted states
/// are separated by theta + 2 phi.
inline std::pair<Ket2, Ket2> tilted_states(const SignalPair& sp, double phi) {
  require_tilt(sp, phi);
  return {Ket2::from_angle(-phi), Ket2::from_angle(sp.theta() + phi)};
}

inline TiltedPovm build_povm(const SignalPair& sp, double phi) {
  const auto [t1, t2] = tilted_states(sp, phi);
  const double overlap = std::abs(inner(t2, t1));
  const double weight = 1.0 / (1.0 + overlap);

  TiltedPovm povm;
  povm.pi1 = weight * outer(orthogonal(t2));
  povm.pi2 = weight * outer(orthogonal(t1));
  povm.pi0 = Op2::identity() - povm.pi1 - povm.pi2;

  if (!psd_check(povm.pi0, 1e-12)) {
    throw std::domain_error("build_povm: inconclusive element is not PSD");
  }
  if (povm.completeness_residual() > 1e-10) {
    throw std::logic_error("build_povm: completeness violated");
  }
  return povm;
}

/// Explicit rank-1 form of the inconclusive element,
/// 2|o|/(1+|o|) |gamma'><gamma'| with o = <psi2'|psi1'>.
inline Op2 inconclusive_from_gamma(const SignalPair& sp, double phi) {
  const auto [t1, t2] = tilted_states(sp, phi);
  const cplx o = inner(t2, t1);
  const double mag = std::abs(o);
  const cplx phase = mag > 0.0 ? o / mag : cplx{1.0, 0.0};
  const double scale = 1.0 / std::sqrt(2.0 * (1.0 + mag));
  const cplx g0 = scale * (t1[0] + phase * t2[0]);
  const cplx g1 = scale * (t1[1] + phase * t2[1]);
  Op2 r;
  r.m[0][0] = g0 * std::conj(g0);
  r.m[0][1] = g0 * std::conj(g1);
  r.m[1][0] = g1 * std::conj(g0);
  r.m[1][1] = g1 * std::conj(g1);
  return (2.0 * mag / (1.0 + mag)) * r;
}

inline OutcomeProbs probs_closed(const SignalPair& sp, double phi) {
  require_tilt(sp, phi);
  const double theta = sp.theta();
  const double denom = 1.0 + std::abs(std::cos(theta + 2.0 * phi));
  const double s = std::sin(theta + phi);
  const double e = std::sin(phi);
  OutcomeProbs p;
  p.p_s = s * s / denom;
  p.p_e = e * e / denom;
  p.p_q = 1.0 - p.p_s - p.p_e;
  return p;
}

/// Squared-bracket closed form for the inconclusive probability (real
/// amplitudes only). Kept as an independent cross-check of completeness.
inline double inconclusive_squared_bracket(const SignalPair& sp, double phi) {
  require_tilt(sp, phi);
  const double theta = sp.theta();
  const double co = std::cos(theta + 2.0 * phi);
  const double bracket = std::cos(phi) + std::cos(theta + phi);
  const double denom = 1.0 + std::abs(co);
  return co * bracket * bracket / (denom * denom);
}

/// Born-rule probabilities averaged over equiprobable signals.
inline OutcomeProbs probs_operator(const SignalPair& sp, const TiltedPovm& povm) {
  const Ket2& a = sp.psi1();
  const Ket2& b = sp.psi2();
  OutcomeProbs p;
  p.p_s = 0.5 * (povm.pi1.expectation(a) + povm.pi2.expectation(b));
  p.p_e = 0.5 * (povm.pi2.expectation(a) + povm.pi1.expectation(b));
  p.p_q = 0.5 * (povm.pi0.expectation(a) + povm.pi0.expectation(b));
  return p;
}

/// Outcome probabilities conditioned on which signal was sent.
struct ConditionalProbs {
  OutcomeProbs given_psi1;
  OutcomeProbs given_psi2;
};

/// Per-signal probabilities from the tilted-basis overlaps,
/// e.g. <psi1|Pi1'|psi1> = |<psi1|psi2'perp>|^2 / (1 + |<psi2'|psi1'>|).
/// Zero overlaps stay exactly zero, which the samplers rely on.
inline ConditionalProbs conditional_probs(const SignalPair& sp, double phi) {
  const auto [t1, t2] = tilted_states(sp, phi);
  const Ket2 perp1 = orthogonal(t1);
  const Ket2 perp2 = orthogonal(t2);
  const double weight = 1.0 / (1.0 + std::abs(inner(t2, t1)));
  auto make = [&](const Ket2& sent, const Ket2& right_perp, const Ket2& wrong_perp) {
    OutcomeProbs p;
    p.p_s = std::min(1.0, weight * std::norm(inner(right_perp, sent)));
    p.p_e = std::min(1.0 - p.p_s, weight * std::norm(inner(wrong_perp, sent)));
    p.p_q = 1.0 - p.p_s - p.p_e;
    return p;
  };
  return {make(sp.psi1(), perp2, perp1), make(sp.psi2(), perp1, perp2)};
}

/// Minimum-error (Helstrom) probabilities for equal priors.
inline OutcomeProbs helstrom_probs(const SignalPair& sp) {
  const double s = std::sin(sp.theta());
  return {0.5 * (1.0 + s), 0.5 * (1.0 - s), 0.0};
}

namespace detail {

template <typename Residual>
double find_symmetric_point(const SignalPair& sp, Residual&& residual, const char* name) {
  if (sp.orthogonal_pair()) {
    throw std::domain_error(std::string(name) + ": no crossing for orthogonal signals");
  }
  const double lo = 1e-6;
  const double hi = sp.phi_max() - 1e-6;
  if (!(hi > lo)) {
    throw std::domain_error(std::string(name) + ": tilt domain too narrow");
  }
  return bisect_root([&](double phi) { return residual(probs_closed(sp, phi)); }, lo, hi);
}

}  // namespace detail

/// Confidence threshold point: the tilt where p_s = p_q.
inline double find_ctp(const SignalPair& sp) {
  return detail::find_symmetric_point(
      sp, [](const OutcomeProbs& p) { return p.p_s - p.p_q; }, "find_ctp");
}

/// Equal-risk point: the tilt where p_e = p_q.
inline double find_erp(const SignalPair& sp) {
  return detail::find_symmetric_point(
      sp, [](const OutcomeProbs& p) { return p.p_e - p.p_q; }, "find_erp");
}

inline DiscriminationMetrics metrics(const OutcomeProbs& p) {
  const double conclusive = 1.0 - p.p_q;
  if (!(conclusive > 0.0)) {
    throw std::domain_error("metrics: accuracy undefined without conclusive outcomes");
  }
  return {100.0 * p.p_s / conclusive, 100.0 * conclusive};
}

}  // namespace phiqkd

#endif  // PHIQKD_GSD_HPP
