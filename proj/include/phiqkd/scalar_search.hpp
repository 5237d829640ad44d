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

#ifndef PHIQKD_SCALAR_SEARCH_HPP
#define PHIQKD_SCALAR_SEARCH_HPP

#include <cmath>
#include <stdexcept>
#include <utility>

namespace phiqkd {

struct BisectionOptions {
  double x_tol = 1e-14;
  int max_iterations = 200;
};

/// Root of a continuous f on [lo, hi] by bisection. f(lo) and f(hi) must have
/// opposite signs (or one of them be zero).
template <typename F>
double bisect_root(F&& f, double lo, double hi, BisectionOptions opts = {}) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    throw std::domain_error("bisect_root: no sign change in bracket");
  }
  for (int it = 0; it < opts.max_iterations && (hi - lo) > opts.x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct ScalarOptimum {
  double x;
  double value;
};

/// Golden-section maximization of f on [lo, hi] until the bracket is narrower
/// than x_tol. Assumes f is unimodal on the bracket.
template <typename F>
ScalarOptimum golden_section_maximize(F&& f, double lo, double hi, double x_tol = 1e-7,
                                      int max_iterations = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iterations && (b - a) > x_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace phiqkd

#endif  // PHIQKD_SCALAR_SEARCH_HPP
