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

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gibbs/numeric.hpp"
#include "gibbs/rng.hpp"

using namespace gibbs;

namespace {

bool same_bits(double a, double b) {
  std::uint64_t ba = 0, bb = 0;
  std::memcpy(&ba, &a, sizeof a);
  std::memcpy(&bb, &b, sizeof b);
  return ba == bb;
}

} // namespace

TEST_CASE("normal_quantile matches reference values") {
  // Reference values computed with an independent double-precision
  // implementation of the inverse normal CDF; frozen as literals.
  const struct {
    double p, q;
  } cases[] = {
      {0.975, 1.959963984540054},
      {0.995, 2.5758293035489004},
      {0.9, 1.2815515655446004},
      {0.75, 0.6744897501960817},
      {0.001, -3.090232306167813},
      {1e-6, -4.753424308822899},
      {1e-10, -6.361340902404056},
      {1e-12, -7.034483825301131},
      {1.0 - 1e-9, 5.997807019601637},
  };
  for (const auto& c : cases) {
    const double got = normal_quantile(c.p);
    CHECK(std::abs(got - c.q) <= 1e-12 * std::max(1.0, std::abs(c.q)));
  }
  CHECK(normal_quantile(0.5) == 0.0);
  // Antisymmetry around the median.
  for (double p : {0.01, 0.2, 0.37, 0.49}) {
    CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(-0.2), std::invalid_argument);
}

TEST_CASE("normal_cdf and normal_quantile invert each other") {
  for (double x : {-6.0, -2.5, -0.3, 0.0, 0.7, 1.959963984540054, 4.0}) {
    const double p = normal_cdf(x);
    CHECK(normal_quantile(p) == doctest::Approx(x).epsilon(1e-11));
  }
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
  CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("logaddexp handles extremes") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(logaddexp(3.0, 4.0) == doctest::Approx(4.313261687518223).epsilon(1e-15));
  CHECK(logaddexp(-inf, 5.0) == 5.0);
  CHECK(logaddexp(5.0, -inf) == 5.0);
  CHECK(logaddexp(-inf, -inf) == -inf);
  CHECK(logaddexp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(logaddexp(1000.0, 0.0) == 1000.0); // e^-1000 underflows the log1p
  CHECK(logaddexp(7.0, 7.0) == doctest::Approx(7.0 + std::log(2.0)).epsilon(1e-16));
}

TEST_CASE("log1pexp is accurate across regimes") {
  CHECK(log1pexp(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-16));
  CHECK(log1pexp(0.5) == doctest::Approx(0.9740769841801067).epsilon(1e-15));
  CHECK(log1pexp(-40.0) == doctest::Approx(4.248354255291589e-18).epsilon(1e-15));
  CHECK(log1pexp(-800.0) == 0.0);
  CHECK(log1pexp(50.0) == 50.0);
  CHECK(log1pexp(745.0) == 745.0); // no overflow
}

TEST_CASE("format_double round trips every double bit for bit") {
  RandomStream rng(0xfeedbeef, 3);
  std::vector<double> values = {0.0,
                                -0.0,
                                1.0,
                                -1.0,
                                0.1,
                                1e-300,
                                -1e300,
                                std::numeric_limits<double>::min(),
                                std::numeric_limits<double>::denorm_min(),
                                std::numeric_limits<double>::max(),
                                std::numeric_limits<double>::infinity(),
                                -std::numeric_limits<double>::infinity()};
  for (int i = 0; i < 2000; ++i) {
    // Random bit patterns cover subnormals and wild exponents; skip NaNs
    // here (tested separately, NaN != NaN).
    const std::uint64_t bits = rng.next_u64();
    double x = 0.0;
    std::memcpy(&x, &bits, sizeof x);
    if (std::isnan(x)) continue;
    values.push_back(x);
  }
  for (double x : values) {
    CHECK(same_bits(parse_double(format_double(x)), x));
  }
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-0.0) == "-0");
}

TEST_CASE("parse_double rejects partial and malformed input") {
  CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
  CHECK(parse_double("-2.5e-3") == -2.5e-3);
  CHECK(parse_double("inf") == std::numeric_limits<double>::infinity());
}

TEST_CASE("pairwise_sum is accurate and deterministic") {
  CHECK(pairwise_sum(nullptr, 0) == 0.0);
  const double one[] = {3.5};
  CHECK(pairwise_sum(one, 1) == 3.5);

  RandomStream rng(42, 9);
  std::vector<double> v(100000);
  long double kahan = 0.0L, comp = 0.0L;
  for (double& x : v) {
    x = rng.uniform(-1.0, 1.0) * std::exp(rng.uniform(-8.0, 8.0));
    const long double y = static_cast<long double>(x) - comp;
    const long double t = kahan + y;
    comp = (t - kahan) - y;
    kahan = t;
  }
  const double got = pairwise_sum(v.data(), v.size());
  const double ref = static_cast<double>(kahan);
  double abs_scale = 0.0;
  for (double x : v) abs_scale += std::abs(x);
  CHECK(std::abs(got - ref) <= 1e-13 * abs_scale);

  // Same input gives the same bits; the tree depends only on n.
  CHECK(same_bits(got, pairwise_sum(v.data(), v.size())));
}
