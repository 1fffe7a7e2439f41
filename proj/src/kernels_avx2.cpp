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

#include <cstddef>

#include "gibbs/kernels.hpp"
#include "internal/basis_plan.hpp"

#if defined(GIBBS_BUILD_AVX2) && defined(__AVX2__)
#include <immintrin.h>
#endif

namespace gibbs::kernels {

namespace detail_dispatch {
bool avx2_linked();
}

#if defined(GIBBS_BUILD_AVX2) && defined(__AVX2__)

namespace detail_dispatch {
bool avx2_linked() { return true; }
}

namespace {

constexpr int kMaxAvxBases = 8;

// Same multiply sequence as detail::ipow, four lanes at a time.
inline __m256d ipow_pd(__m256d base, unsigned e) {
  __m256d result = _mm256_set1_pd(1.0);
  __m256d b = base;
  while (e != 0) {
    if (e & 1u) result = _mm256_mul_pd(result, b);
    b = _mm256_mul_pd(b, b);
    e >>= 1;
  }
  return result;
}

inline double hsum_ordered(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

} // namespace

AccumResult accumulate_stats_avx2(const double* xs, const double* ys, std::size_t n,
                                  double ux, double uy, double R2,
                                  const ModelSpec& m, double* out) {
  const std::size_t nb = m.basis.size();
  unsigned half[kMaxAvxBases];
  for (std::size_t b = 0; b < nb; ++b)
    half[b] = static_cast<unsigned>(m.basis[b].gamma) / 2u;

  const __m256d uxv = _mm256_set1_pd(ux);
  const __m256d uyv = _mm256_set1_pd(uy);
  const __m256d r2v = _mm256_set1_pd(R2);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc[kMaxAvxBases];
  for (std::size_t b = 0; b < nb; ++b) acc[b] = zero;

  AccumResult res;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(xs + k);
    const __m256d y = _mm256_loadu_pd(ys + k);
    const __m256d dx = _mm256_sub_pd(x, uxv);
    const __m256d dy = _mm256_sub_pd(y, uyv);
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    const __m256d in_mask = _mm256_cmp_pd(r2, r2v, _CMP_LE_OQ);
    const __m256d nz_mask = _mm256_cmp_pd(r2, zero, _CMP_NEQ_OQ);
    const __m256d use = _mm256_and_pd(in_mask, nz_mask);
    const int use_bits = _mm256_movemask_pd(use);
    const int zero_bits = _mm256_movemask_pd(_mm256_andnot_pd(nz_mask, in_mask));
    res.in_range += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(use_bits)));
    res.zero_hits += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(zero_bits)));
    if (use_bits == 0) continue;
    // Lanes with r2 == 0 produce inf here; the bitwise AND against the use
    // mask turns them into +0.0 before they touch an accumulator.
    const __m256d inv = _mm256_div_pd(one, r2);
    for (std::size_t b = 0; b < nb; ++b) {
      const __m256d g = ipow_pd(inv, half[b]);
      acc[b] = _mm256_add_pd(acc[b], _mm256_and_pd(g, use));
    }
  }

  for (std::size_t b = 0; b < nb; ++b) out[b] += hsum_ordered(acc[b]);

  for (; k < n; ++k) {
    const double dx = xs[k] - ux;
    const double dy = ys[k] - uy;
    const double r2 = dx * dx + dy * dy;
    if (!(r2 <= R2)) continue;
    if (r2 == 0.0) {
      ++res.zero_hits;
      continue;
    }
    ++res.in_range;
    const double inv = 1.0 / r2;
    for (std::size_t b = 0; b < nb; ++b) out[b] += detail::ipow(inv, half[b]);
  }
  return res;
}

#else // stub when the toolchain cannot target AVX2

namespace detail_dispatch {
bool avx2_linked() { return false; }
}

AccumResult accumulate_stats_avx2(const double* xs, const double* ys, std::size_t n,
                                  double ux, double uy, double R2,
                                  const ModelSpec& m, double* out) {
  return accumulate_stats_scalar(xs, ys, n, ux, uy, R2, m, out);
}

#endif

} // namespace gibbs::kernels
