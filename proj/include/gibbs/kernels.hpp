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

#ifndef GIBBS_KERNELS_HPP
#define GIBBS_KERNELS_HPP

#include <cstddef>

#include "gibbs/model.hpp"

namespace gibbs::kernels {

// Result of one accumulation pass.
struct AccumResult {
  std::size_t in_range = 0;  // points with 0 < r^2 <= R2
  std::size_t zero_hits = 0; // points exactly coincident with (ux, uy)
};

// Accumulates out[m] += sum_k g_{m+2}((x_k, y_k) - u) over all points with
// 0 < r^2 <= R2; out has m.p() - 1 entries and is NOT cleared first.
// Coincident points are counted in zero_hits and contribute nothing; the
// caller applies the exclusion/singularity policy. Deterministic: points
// are consumed in array order.
AccumResult accumulate_stats(const double* xs, const double* ys, std::size_t n,
                             double ux, double uy, double R2,
                             const ModelSpec& m, double* out);

// Reference implementation (plain scalar loop).
AccumResult accumulate_stats_scalar(const double* xs, const double* ys, std::size_t n,
                                    double ux, double uy, double R2,
                                    const ModelSpec& m, double* out);

// AVX2 implementation; call only when avx2_supported() and avx2_eligible(m).
AccumResult accumulate_stats_avx2(const double* xs, const double* ys, std::size_t n,
                                  double ux, double uy, double R2,
                                  const ModelSpec& m, double* out);

// True when the binary carries the AVX2 kernel and the CPU can run it.
bool avx2_supported();

// The vector path handles pure power-law bases with even integer exponents
// (the Lennard-Jones case); everything else takes the scalar path.
bool avx2_eligible(const ModelSpec& m);

// "avx2" or "scalar": what accumulate_stats would pick for this model.
const char* active_kernel_name(const ModelSpec& m);

} // namespace gibbs::kernels

#endif // GIBBS_KERNELS_HPP
