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

#ifndef GIBBS_NUMERIC_HPP
#define GIBBS_NUMERIC_HPP

#include <cstddef>
#include <string>
#include <string_view>

namespace gibbs {

// log(e^a + e^b) without overflow; handles -inf arguments.
double logaddexp(double a, double b);

// log(1 + e^x), stable for large |x|.
double log1pexp(double x);

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF (Wichura's AS 241 rational approximations,
// double precision). Requires 0 < p < 1.
double normal_quantile(double p);

// Shortest decimal representation that parses back to the same bits.
// Handles negative zero, infinities and NaN ("inf", "-inf", "nan").
std::string format_double(double x);

// Inverse of format_double; throws std::invalid_argument if the whole
// string is not a number.
double parse_double(std::string_view s);

// Deterministic pairwise reduction: the summation tree depends only on n,
// never on threading, so results are reproducible bit for bit.
double pairwise_sum(const double* v, std::size_t n);

} // namespace gibbs

#endif // GIBBS_NUMERIC_HPP
