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

#include "phiqkd/keyrate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"

using namespace phiqkd;

namespace {

constexpr double kPi = std::numbers::pi;
const FiniteKeyParams kDefaults{};

}  // namespace

TEST(BinaryEntropy, Values) {
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_NEAR(binary_entropy(0.128571), 0.553506, 5e-5);
  EXPECT_NEAR(binary_entropy(0.048188), 0.278649, 5e-5);
  EXPECT_THROW(binary_entropy(-1e-9), std::domain_error);
  EXPECT_THROW(binary_entropy(1.0 + 1e-9), std::domain_error);
  EXPECT_THROW(binary_entropy(std::nan("")), std::domain_error);
}

TEST(BinaryEntropy, SymmetryAndConcavityProperty) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(gen), b = u(gen);
    ASSERT_NEAR(binary_entropy(a), binary_entropy(1.0 - a), 1e-12);
    ASSERT_NEAR(binary_entropy(a), oracle::entropy(a), 1e-12);
    const double mid = binary_entropy(0.5 * (a + b));
    ASSERT_GE(mid + 1e-12, 0.5 * (binary_entropy(a) + binary_entropy(b)));
  }
}

TEST(Qber, Values) {
  const SignalPair sp(kPi / 4);
  EXPECT_NEAR(qber(probs_closed(sp, 0.050389)), 0.004588, 2e-6);
  EXPECT_NEAR(qber(probs_closed(sp, 0.083261)), 0.011726, 2e-6);
  EXPECT_EQ(qber(probs_closed(sp, 0.0)), 0.0);
  EXPECT_THROW(qber(OutcomeProbs{0.0, 0.0, 1.0}), std::domain_error);
}

TEST(AsymptoticRate, ReferencePoints) {
  const SignalPair sp(kPi / 4);
  EXPECT_NEAR(asymptotic_rate(sp, 0.050389), 0.310055, 1e-3);
  EXPECT_NEAR(asymptotic_rate(sp, find_ctp(sp)), 0.226816, 1e-3);
  EXPECT_NEAR(asymptotic_rate(sp, find_erp(sp)), -0.094521, 1e-3);
}

TEST(AsymptoticRate, MatchesOracleProperty) {
  std::mt19937_64 gen(41);
  for (int i = 0; i < 1000; ++i) {
    const auto [theta, phi] = oracle::random_point(gen);
    const SignalPair sp(theta);
    ASSERT_NEAR(asymptotic_rate(sp, phi), oracle::asymptotic(theta, phi), 1e-10) << theta << " " << phi;
  }
}

TEST(Hoeffding, Values) {
  EXPECT_NEAR(hoeffding_delta(100'000, 1e-10), 0.010890, 1e-6);
  EXPECT_NEAR(hoeffding_delta(100'000, 1e-10), 0.0108901327, 1e-10);
  EXPECT_NEAR(hoeffding_delta(344'302, 1e-10), 0.005868990, 1e-9);
  EXPECT_THROW(hoeffding_delta(0, 1e-10), std::invalid_argument);
  EXPECT_DOUBLE_EQ(worst_case_qber(0.49, 0.02), 0.5);
  EXPECT_DOUBLE_EQ(worst_case_qber(0.1, 0.02), 0.12);
}

TEST(FiniteRate, ReferencePoints) {
  const SignalPair sp(kPi / 4);
  EXPECT_NEAR(finite_rate(sp, 0.083261, kDefaults), 0.188063, 1e-3);
  // mpmath, tests/oracle/frozen_values.py
  EXPECT_NEAR(finite_rate(sp, 0.083261, kDefaults), 0.18806083, 1e-7);
  EXPECT_NEAR(finite_rate(sp, 0.050389, kDefaults), 0.18366210, 1e-7);
}

TEST(FiniteRate, ClampsUsableFraction) {
  // eta < n/N at small theta: the rate is zero, never a product of two negatives.
  const SignalPair sp(0.05);
  EXPECT_EQ(finite_rate(sp, 0.0, kDefaults), 0.0);
  EXPECT_NEAR(finite_rate(sp, 0.01, kDefaults), oracle::finite(0.05, 0.01), 1e-12);
}

TEST(Composable, ReferencePoint) {
  const SignalPair sp(kPi / 4);
  EXPECT_NEAR(security_penalty(kDefaults), 100.65784285, 1e-7);
  EXPECT_NEAR(composable_key_length(sp, 0.073953, kDefaults), 181958.0, 200.0);
  EXPECT_NEAR(secure_rate(sp, 0.073953, kDefaults), 0.181958, 2e-4);
  EXPECT_NEAR(b92_secure_rate(sp, kDefaults), 0.156862, 2e-4);
  EXPECT_NEAR(b92_secure_rate(sp, kDefaults), 0.1568620, 1e-6);
  const double improvement =
      100.0 * (secure_rate(sp, 0.073953, kDefaults) / b92_secure_rate(sp, kDefaults) - 1.0);
  EXPECT_NEAR(improvement, 16.0, 0.5);
}

TEST(Composable, OrthogonalPairUsesOneBit) {
  const SignalPair sp(kPi / 2);
  EXPECT_NEAR(b92_secure_rate(sp, kDefaults), 0.73225474, 1e-7);
  EXPECT_NEAR(secure_rate(sp, 0.0, kDefaults), 0.73225474, 1e-7);
}

TEST(Composable, MatchesOracleProperty) {
  std::mt19937_64 gen(43);
  for (int i = 0; i < 1000; ++i) {
    const auto [theta, phi] = oracle::random_point(gen);
    const SignalPair sp(theta);
    ASSERT_NEAR(secure_rate(sp, phi, kDefaults), oracle::secure(theta, phi), 1e-9);
    ASSERT_NEAR(finite_rate(sp, phi, kDefaults), oracle::finite(theta, phi), 1e-10);
  }
}

TEST(Composable, ZeroTiltEqualsB92Property) {
  for (int i = 0; i < 50; ++i) {
    const double theta = 0.02 + (kPi / 2 - 0.02) * i / 49.0;
    const SignalPair sp(theta);
    EXPECT_NEAR(secure_rate(sp, 0.0, kDefaults), b92_secure_rate(sp, kDefaults), 1e-9) << theta;
    EXPECT_NEAR(b92_secure_rate(sp, kDefaults), oracle::b92(theta), 1e-9) << theta;
  }
}

TEST(Rates, OrderingProperty) {
  // Asymptotic >= finite wherever the finite usable fraction is positive;
  // finite >= secure because the composable length also pays f H and the penalty.
  std::mt19937_64 gen(47);
  for (int i = 0; i < 2000; ++i) {
    const auto [theta, phi] = oracle::random_point(gen);
    const SignalPair sp(theta);
    const KeyRateReport r = evaluate(sp, phi, kDefaults);
    if (r.eta <= 0.1 || r.r_finite <= 0.0) continue;
    ASSERT_GE(r.r_asymptotic + 1e-12, r.r_finite) << theta << " " << phi;
    ASSERT_GE(r.r_finite + 1e-12, r.r_secure) << theta << " " << phi;
  }
}

TEST(Rates, MonotoneInBudgetProperty) {
  std::mt19937_64 gen(53);
  for (int i = 0; i < 300; ++i) {
    const auto [theta, phi] = oracle::random_point(gen);
    const SignalPair sp(theta);
    FiniteKeyParams worse_f = kDefaults;
    worse_f.ec_efficiency = 1.3;
    FiniteKeyParams tighter = kDefaults;
    tighter.eps_sec = 1e-12;
    tighter.eps_pe = 1e-12;
    const double base = secure_rate(sp, phi, kDefaults);
    ASSERT_LE(secure_rate(sp, phi, worse_f), base + 1e-15);
    ASSERT_LE(secure_rate(sp, phi, tighter), base + 1e-15);
  }
}

TEST(Rates, ContinuousInTilt) {
  const SignalPair sp(kPi / 4);
  for (int i = 0; i < 200; ++i) {
    const double phi = sp.phi_max() * i / 200.0;
    const double h = 1e-7;
    EXPECT_LT(std::abs(secure_rate(sp, phi + h, kDefaults) - secure_rate(sp, phi, kDefaults)), 1e-4);
    EXPECT_LT(std::abs(asymptotic_rate(sp, phi + h) - asymptotic_rate(sp, phi)), 1e-4);
  }
}

TEST(Evaluate, ReportFields) {
  const SignalPair sp(kPi / 4);
  const KeyRateReport r = evaluate(sp, 0.073953, kDefaults);
  EXPECT_NEAR(r.eta, 0.363057, 2e-6);
  EXPECT_NEAR(r.delta, 0.0108901327, 1e-10);
  EXPECT_FALSE(r.q_worst_clamped);
  EXPECT_TRUE(r.positive.asymptotic && r.positive.finite && r.positive.secure);
  EXPECT_DOUBLE_EQ(r.r_secure, r.key_length / 1e6);

  const KeyRateReport erp = evaluate(sp, find_erp(sp), kDefaults);
  EXPECT_FALSE(erp.positive.asymptotic);
  EXPECT_FALSE(erp.positive.secure);
}

TEST(FiniteKeyParams, Validation) {
  FiniteKeyParams p;
  p.test_bits = p.total_signals;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.eps_pe = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.ec_efficiency = 0.9;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_NO_THROW(FiniteKeyParams{}.validate());
}
