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

// Seeded Monte Carlo runs of the phiQKD protocol and a Neumark-dilation
// sampler for the two-qubit measurement circuit.
//
// Randomness: rounds are grouped into fixed chunks of kRoundsPerChunk and
// chunk k draws from StreamRng(seed, k); test-bit selection uses the stream
// kSelectionStream once every round is fixed. Results are therefore identical
// for any thread count.

#ifndef PHIQKD_SIMULATOR_HPP
#define PHIQKD_SIMULATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "phiqkd/gsd.hpp"
#include "phiqkd/keyrate.hpp"
#include "phiqkd/parallel.hpp"
#include "phiqkd/qmath.hpp"
#include "phiqkd/rng.hpp"

namespace phiqkd {

inline constexpr std::uint64_t kRoundsPerChunk = 1u << 16;
inline constexpr std::uint64_t kSelectionStream = UINT64_MAX;

struct SimulationConfig {
  double theta = std::numbers::pi / 4.0;
  double phi = 0.0;
  FiniteKeyParams fk;
  std::uint64_t seed = 1;
  std::uint64_t shots = 1'000'000;  // histogram mode only
  unsigned threads = 0;             // 0: hardware concurrency; never affects results
};

struct OutcomeCounts {
  std::uint64_t correct = 0;
  std::uint64_t incorrect = 0;
  std::uint64_t inconclusive = 0;

  std::uint64_t total() const { return correct + incorrect + inconclusive; }
  bool operator==(const OutcomeCounts&) const = default;
};

struct SimulationSummary {
  bool key_extracted = false;
  std::string failure;            // set when no key could be formed
  bool low_sift_warning = false;  // n exceeds the expected sifted count
  OutcomeCounts counts;
  std::uint64_t n_sifted = 0;
  std::uint64_t test_errors = 0;
  double q_hat = 0.0;
  double delta = 0.0;
  double q_worst_hat = 0.0;
  bool q_worst_clamped = false;
  double key_length_hat = 0.0;  // floored, >= 0
  double r_secure_hat = 0.0;

  bool operator==(const SimulationSummary&) const = default;
};

enum class Outcome : std::uint8_t { correct = 0, incorrect = 1, inconclusive = 2 };

/// Draws one round per entry: Alice's bit, then Bob's outcome conditioned on
/// the state she sent.
inline std::vector<Outcome> sample_rounds(const SignalPair& sp, double phi, std::uint64_t rounds,
                                          std::uint64_t seed, unsigned threads) {
  const ConditionalProbs cond = conditional_probs(sp, phi);
  std::vector<Outcome> out(rounds);
  const std::uint64_t chunks = (rounds + kRoundsPerChunk - 1) / kRoundsPerChunk;
  parallel_for(chunks, threads, [&](std::size_t chunk) {
    StreamRng rng(seed, chunk);
    const std::uint64_t begin = chunk * kRoundsPerChunk;
    const std::uint64_t end = std::min(rounds, begin + kRoundsPerChunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      const OutcomeProbs& p = rng.coin() ? cond.given_psi2 : cond.given_psi1;
      const double u = rng.uniform01();
      out[i] = u < p.p_s ? Outcome::correct : (u < p.p_s + p.p_e ? Outcome::incorrect : Outcome::inconclusive);
    }
  });
  return out;
}

/// Partial Fisher-Yates: `count` distinct positions drawn uniformly from
/// [0, population), in draw order.
inline std::vector<std::uint64_t> select_test_positions(std::uint64_t population, std::uint64_t count,
                                                        std::uint64_t seed) {
  if (count > population) {
    throw std::invalid_argument("select_test_positions: count exceeds population");
  }
  std::vector<std::uint64_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::uint64_t{0});
  StreamRng rng(seed, kSelectionStream);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t j = i + rng.below(population - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

inline SimulationSummary run_protocol(const SimulationConfig& cfg) {
  cfg.fk.validate();
  const SignalPair sp(cfg.theta);
  require_tilt(sp, cfg.phi);
  const FiniteKeyParams& fk = cfg.fk;

  SimulationSummary s;
  const OutcomeProbs expected = probs_closed(sp, cfg.phi);
  s.low_sift_warning =
      static_cast<double>(fk.test_bits) > (expected.p_s + expected.p_e) * static_cast<double>(fk.total_signals);

  const std::vector<Outcome> rounds = sample_rounds(sp, cfg.phi, fk.total_signals, cfg.seed, cfg.threads);
  std::vector<std::uint8_t> sifted_error;
  sifted_error.reserve(rounds.size());
  for (Outcome o : rounds) {
    switch (o) {
      case Outcome::correct:
        ++s.counts.correct;
        sifted_error.push_back(0);
        break;
      case Outcome::incorrect:
        ++s.counts.incorrect;
        sifted_error.push_back(1);
        break;
      case Outcome::inconclusive: ++s.counts.inconclusive; break;
    }
  }
  s.n_sifted = sifted_error.size();
  s.delta = hoeffding_delta(fk.test_bits, fk.eps_pe);

  if (s.n_sifted < fk.test_bits) {
    s.failure = "only " + std::to_string(s.n_sifted) + " sifted bits for " + std::to_string(fk.test_bits) +
                " test bits";
    return s;
  }

  for (std::uint64_t pos : select_test_positions(s.n_sifted, fk.test_bits, cfg.seed)) {
    s.test_errors += sifted_error[pos];
  }
  s.q_hat = static_cast<double>(s.test_errors) / static_cast<double>(fk.test_bits);
  s.q_worst_hat = worst_case_qber(s.q_hat, s.delta);
  s.q_worst_clamped = s.q_hat + s.delta > 0.5;

  const double remaining = static_cast<double>(s.n_sifted - fk.test_bits);
  const double ell = key_length_for(remaining, source_bits(sp), s.q_worst_hat, fk);
  s.key_length_hat = std::floor(std::max(ell, 0.0));
  s.r_secure_hat = s.key_length_hat / static_cast<double>(fk.total_signals);
  s.key_extracted = s.key_length_hat > 0.0;
  if (!s.key_extracted) s.failure = "composable key length is not positive";
  return s;
}

// ---------------------------------------------------------------------------
// Neumark dilation
// ---------------------------------------------------------------------------

enum class Signal { first, second };

/// Two-bit measurement labels. The value doubles as the basis index of the
/// system (x) ancilla space; index 3 ("11") is never populated.
struct DilationOutcomeMap {
  std::uint8_t label_correct = 0b00;
  std::uint8_t label_incorrect = 0b01;
  std::uint8_t label_inconclusive = 0b10;
};

inline std::string label_bits(std::uint8_t label) {
  return {static_cast<char>('0' + ((label >> 1) & 1)), static_cast<char>('0' + (label & 1))};
}

/// u with m = |u><u|, for a PSD operator of rank at most one.
inline std::array<cplx, 2> rank_one_factor(const Op2& m) {
  const double d0 = m(0, 0).real();
  const double d1 = m(1, 1).real();
  if (d0 + d1 < 1e-14) return {cplx{0.0}, cplx{0.0}};
  if (std::abs(m.det()) > 1e-12) {
    throw std::domain_error("rank_one_factor: POVM element has rank 2");
  }
  const std::size_t j = d0 >= d1 ? 0 : 1;
  const double scale = 1.0 / std::sqrt(j == 0 ? d0 : d1);
  return {m(0, j) * scale, m(1, j) * scale};
}

struct Dilation {
  Unitary4 unitary;
  DilationOutcomeMap labels;
  Signal sent = Signal::second;

  /// Probability of each basis index after applying U to |psi> (x) |0>_ancilla.
  std::array<double, 4> label_probabilities(const Ket2& input) const {
    const Vec4 out = unitary.apply(Vec4{input[0], input[1], 0.0, 0.0});
    return {std::norm(out[0]), std::norm(out[1]), std::norm(out[2]), std::norm(out[3])};
  }

  /// (correct, incorrect, inconclusive) relative to the sent signal.
  OutcomeProbs outcome_probabilities(const Ket2& input) const {
    const auto p = label_probabilities(input);
    return {p[labels.label_correct], p[labels.label_incorrect], p[labels.label_inconclusive]};
  }
};

/// Realizes the POVM as a projective measurement on system (x) ancilla.
/// The isometry V|psi> = sum_i |label_i><u_i|psi> (Pi_i = |u_i><u_i|) forms
/// the first two columns of U; complete_to_unitary fills in the rest.
/// Labels are relative to `sent`: its own element is "correct".
inline Dilation neumark_unitary(const TiltedPovm& povm, Signal sent = Signal::second) {
  Dilation d;
  d.sent = sent;
  const Op2& right = sent == Signal::first ? povm.pi1 : povm.pi2;
  const Op2& wrong = sent == Signal::first ? povm.pi2 : povm.pi1;

  std::array<std::array<cplx, 2>, 4> factors{};
  factors[d.labels.label_correct] = rank_one_factor(right);
  factors[d.labels.label_incorrect] = rank_one_factor(wrong);
  factors[d.labels.label_inconclusive] = rank_one_factor(povm.pi0);

  std::array<Vec4, 2> cols{};
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t label = 0; label < 4; ++label) cols[k][label] = std::conj(factors[label][k]);

  d.unitary = complete_to_unitary(cols);
  return d;
}

/// Dilation probabilities averaged over equiprobable signals, each signal
/// measured through the dilation labelled relative to itself.
inline OutcomeProbs dilation_probs(const SignalPair& sp, double phi) {
  const TiltedPovm povm = build_povm(sp, phi);
  const OutcomeProbs a = neumark_unitary(povm, Signal::first).outcome_probabilities(sp.psi1());
  const OutcomeProbs b = neumark_unitary(povm, Signal::second).outcome_probabilities(sp.psi2());
  return {0.5 * (a.p_s + b.p_s), 0.5 * (a.p_e + b.p_e), 0.5 * (a.p_q + b.p_q)};
}

struct HistogramCounts {
  std::uint64_t correct = 0;       // label 00
  std::uint64_t incorrect = 0;     // label 01
  std::uint64_t inconclusive = 0;  // label 10
  std::uint64_t unused = 0;        // label 11

  std::uint64_t total() const { return correct + incorrect + inconclusive + unused; }
  bool operator==(const HistogramCounts&) const = default;
};

/// Samples `shots` label readouts of the dilated circuit, the signal being
/// drawn equiprobably per shot.
inline HistogramCounts dilation_histogram(const SimulationConfig& cfg) {
  const SignalPair sp(cfg.theta);
  const TiltedPovm povm = build_povm(sp, cfg.phi);
  const std::array<std::array<double, 4>, 2> dist = {
      neumark_unitary(povm, Signal::first).label_probabilities(sp.psi1()),
      neumark_unitary(povm, Signal::second).label_probabilities(sp.psi2())};

  const std::uint64_t chunks = (cfg.shots + kRoundsPerChunk - 1) / kRoundsPerChunk;
  std::vector<std::array<std::uint64_t, 4>> per_chunk(chunks);
  parallel_for(chunks, cfg.threads, [&](std::size_t chunk) {
    StreamRng rng(cfg.seed, chunk);
    const std::uint64_t begin = chunk * kRoundsPerChunk;
    const std::uint64_t end = std::min(cfg.shots, begin + kRoundsPerChunk);
    auto& tally = per_chunk[chunk];
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto& p = dist[rng.coin() ? 1 : 0];
      const double u = rng.uniform01();
      double acc = 0.0;
      std::size_t label = 3;
      for (std::size_t k = 0; k < 3; ++k) {
        acc += p[k];
        if (u < acc) {
          label = k;
          break;
        }
      }
      ++tally[label];
    }
  });

  HistogramCounts h;
  for (const auto& t : per_chunk) {
    h.correct += t[0];
    h.incorrect += t[1];
    h.inconclusive += t[2];
    h.unused += t[3];
  }
  return h;
}

}  // namespace phiqkd

#endif  // PHIQKD_SIMULATOR_HPP
