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

#ifndef PHIQKD_QMATH_HPP
#define PHIQKD_QMATH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace phiqkd {

using cplx = std::complex<double>;

/// Normalized single-qubit state.
///
/// Stored with the first nonzero amplitude real and non-negative, so two kets
/// that differ only by a global phase compare equal component-wise.
class Ket2 {
 public:
  Ket2() : amp_{cplx{1.0, 0.0}, cplx{0.0, 0.0}} {}

  Ket2(cplx a0, cplx a1) {
    const double norm = std::sqrt(std::norm(a0) + std::norm(a1));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw std::invalid_argument("Ket2: zero or non-finite amplitude vector");
    }
    a0 /= norm;
    a1 /= norm;
    // Phase convention: first amplitude with nonzero magnitude is made real >= 0.
    const cplx lead = std::abs(a0) > 1e-15 ? a0 : a1;
    const cplx phase = std::conj(lead) / std::abs(lead);
    amp_ = {a0 * phase, a1 * phase};
    if (std::abs(amp_[0]) <= 1e-15) {
      amp_[0] = 0.0;
    } else {
      amp_[0] = amp_[0].real();
    }
  }

  /// Real ket cos(angle)|0> + sin(angle)|1>.
  static Ket2 from_angle(double angle) { return Ket2(std::cos(angle), std::sin(angle)); }

  cplx operator[](std::size_t i) const { return amp_[i]; }
  cplx a0() const { return amp_[0]; }
  cplx a1() const { return amp_[1]; }

  double norm() const { return std::sqrt(std::norm(amp_[0]) + std::norm(amp_[1])); }

 private:
  std::array<cplx, 2> amp_;
};

/// <bra|ket>
inline cplx inner(const Ket2& bra, const Ket2& ket) {
  return std::conj(bra[0]) * ket[0] + std::conj(bra[1]) * ket[1];
}

/// 2x2 complex operator, row-major.
struct Op2 {
  std::array<std::array<cplx, 2>, 2> m{};

  static Op2 identity() {
    Op2 r;
    r.m[0][0] = 1.0;
    r.m[1][1] = 1.0;
    return r;
  }

  cplx operator()(std::size_t r, std::size_t c) const { return m[r][c]; }

  Op2 adjoint() const {
    Op2 r;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) r.m[i][j] = std::conj(m[j][i]);
    return r;
  }

  cplx trace() const { return m[0][0] + m[1][1]; }
  cplx det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

  /// <k|M|k>, real part (exact for Hermitian M).
  double expectation(const Ket2& k) const {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) acc += std::conj(k[i]) * m[i][j] * k[j];
    return acc.real();
  }

  /// Largest elementwise magnitude of M - M^dagger.
  double hermiticity_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) worst = std::max(worst, std::abs(m[i][j] - std::conj(m[j][i])));
    return worst;
  }

  bool is_hermitian(double tol) const { return hermiticity_residual() <= tol; }

  /// Largest elementwise magnitude.
  double max_abs() const {
    double worst = 0.0;
    for (const auto& row : m)
      for (const auto& v : row) worst = std::max(worst, std::abs(v));
    return worst;
  }

  friend Op2 operator+(Op2 a, const Op2& b) {
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) a.m[i][j] += b.m[i][j];
    return a;
  }
  friend Op2 operator-(Op2 a, const Op2& b) {
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) a.m[i][j] -= b.m[i][j];
    return a;
  }
  friend Op2 operator*(double s, Op2 a) {
    for (auto& row : a.m)
      for (auto& v : row) v *= s;
    return a;
  }
  friend Op2 operator*(const Op2& a, const Op2& b) {
    Op2 r;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
    return r;
  }
};

/// |k><k|
inline Op2 outer(const Ket2& k) {
  Op2 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) r.m[i][j] = k[i] * std::conj(k[j]);
  return r;
}

/// The unique (up to phase) state orthogonal to k.
inline Ket2 orthogonal(const Ket2& k) { return Ket2(-std::conj(k[1]), std::conj(k[0])); }

/// 2x2 PSD test via trace and determinant. Throws if m is not Hermitian within tol.
inline bool psd_check(const Op2& m, double tol) {
  if (!m.is_hermitian(tol)) {
    throw std::invalid_argument("psd_check: operator is not Hermitian");
  }
  return m.trace().real() >= -tol && m.det().real() >= -tol &&
         m(0, 0).real() >= -tol && m(1, 1).real() >= -tol;
}

using Vec4 = std::array<cplx, 4>;

inline cplx inner(const Vec4& a, const Vec4& b) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline double norm(const Vec4& a) { return std::sqrt(inner(a, a).real()); }

/// 4x4 unitary, row-major. Column c is the image of basis vector |c>.
struct Unitary4 {
  std::array<std::array<cplx, 4>, 4> m{};

  cplx operator()(std::size_t r, std::size_t c) const { return m[r][c]; }

  Vec4 column(std::size_t c) const { return {m[0][c], m[1][c], m[2][c], m[3][c]}; }

  Vec4 apply(const Vec4& v) const {
    Vec4 out{};
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) out[r] += m[r][c] * v[c];
    return out;
  }

  /// max |(U^dagger U - I)_{ij}|
  double unitarity_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        const cplx g = inner(column(i), column(j));
        worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    }
    return worst;
  }
};

/// Extends up to four orthonormal columns to a full unitary. The given columns
/// are kept verbatim and in order; the rest come from Gram-Schmidt (two passes)
/// over the canonical basis.
inline Unitary4 complete_to_unitary(std::span<const Vec4> cols) {
  constexpr double kOrthoTol = 1e-10;
  if (cols.size() > 4) {
    throw std::invalid_argument("complete_to_unitary: more than four columns");
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i; j < cols.size(); ++j) {
      const cplx g = inner(cols[i], cols[j]);
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > kOrthoTol) {
        throw std::invalid_argument("complete_to_unitary: input columns are not orthonormal");
      }
    }
  }

  std::array<Vec4, 4> basis{};
  std::size_t filled = 0;
  for (const auto& c : cols) basis[filled++] = c;

  while (filled < 4) {
    // Pick the canonical vector with the largest residual; its squared length
    // is at least (4 - filled) / 4.
    Vec4 best{};
    double best_len = -1.0;
    for (std::size_t e = 0; e < 4; ++e) {
      Vec4 v{};
      v[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < filled; ++k) {
          const cplx proj = inner(basis[k], v);
          for (std::size_t i = 0; i < 4; ++i) v[i] -= proj * basis[k][i];
        }
      }
      const double len = norm(v);
      if (len > best_len) {
        best_len = len;
        best = v;
      }
    }
    for (auto& x : best) x /= best_len;
    basis[filled++] = best;
  }

  Unitary4 u;
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t r = 0; r < 4; ++r) u.m[r][c] = basis[c][r];
  return u;
}

}  // namespace phiqkd

#endif  // PHIQKD_QMATH_HPP
