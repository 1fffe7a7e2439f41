/*
 * Copyright 2026 the artifact authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GIBBS_INTERNAL_BASIS_PLAN_HPP
#define GIBBS_INTERNAL_BASIS_PLAN_HPP

#include <cmath>

#include "gibbs/model.hpp"

namespace gibbs::detail {

// Integer-exponent powers go through binary exponentiation on 1/r^2
// (r^-12 = ((1/r^2)^3)^2 and so on); only odd exponents pay a sqrt and only
// non-integer ones a pow. The vector kernel replays the same multiply
// sequence, so scalar and vector lanes round identically.
inline double ipow(double base, unsigned e) {
  double result = 1.0;
  double b = base;
  while (e != 0) {
    if (e & 1u) result *= b;
    b *= b;
    e >>= 1;
  }
  return result;
}

struct BasisPlan {
  enum class Kind { EvenPow, OddPow, GenPow, ExpEven, ExpGen };
  Kind kind = Kind::EvenPow;
  unsigned half = 3;           // exponent of 1/r^2 for the integer paths
  double neg_half_gamma = 0.0; // -gamma/2 for the pow paths
};

inline BasisPlan make_plan(const BasisFunction& b) {
  BasisPlan plan;
  plan.neg_half_gamma = -0.5 * b.gamma;
  const bool integral = (b.gamma == std::floor(b.gamma)) && b.gamma <= 64.0;
  const bool even = integral && (static_cast<long>(b.gamma) % 2 == 0);
  if (b.form == BasisForm::PowerLaw) {
    if (even) {
      plan.kind = BasisPlan::Kind::EvenPow;
      plan.half = static_cast<unsigned>(b.gamma) / 2u;
    } else if (integral) {
      plan.kind = BasisPlan::Kind::OddPow;
      plan.half = (static_cast<unsigned>(b.gamma) - 1u) / 2u;
    } else {
      plan.kind = BasisPlan::Kind::GenPow;
    }
  } else {
    if (even) {
      plan.kind = BasisPlan::Kind::ExpEven;
      plan.half = static_cast<unsigned>(b.gamma) / 2u;
    } else {
      plan.kind = BasisPlan::Kind::ExpGen;
    }
  }
  return plan;
}

// g(r) from r^2 and a precomputed inv = 1/r^2.
inline double eval_plan(const BasisPlan& p, double r2, double inv) {
  switch (p.kind) {
    case BasisPlan::Kind::EvenPow:
      return ipow(inv, p.half);
    case BasisPlan::Kind::OddPow:
      return ipow(inv, p.half) * std::sqrt(inv);
    case BasisPlan::Kind::GenPow:
      return std::pow(r2, p.neg_half_gamma);
    case BasisPlan::Kind::ExpEven:
      return std::exp(-std::sqrt(r2)) * ipow(inv, p.half);
    case BasisPlan::Kind::ExpGen:
    default:
      return std::exp(-std::sqrt(r2)) * std::pow(r2, p.neg_half_gamma);
  }
}

inline constexpr int kMaxPlannedBases = 16;

} // namespace gibbs::detail

#endif // GIBBS_INTERNAL_BASIS_PLAN_HPP
