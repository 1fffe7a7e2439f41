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

#include "gibbs/kernels.hpp"

namespace gibbs::kernels {

namespace detail_dispatch {
bool avx2_linked(); // defined in kernels_avx2.cpp
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = detail_dispatch::avx2_linked() &&
                         __builtin_cpu_supports("avx2") &&
                         __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

bool avx2_eligible(const ModelSpec& m) {
  if (m.basis.empty() || m.basis.size() > 8) return false;
  for (const BasisFunction& b : m.basis) {
    if (b.form != BasisForm::PowerLaw) return false;
    if (b.gamma != std::floor(b.gamma)) return false;
    if (b.gamma <= 0.0 || b.gamma > 64.0) return false;
    if (static_cast<long>(b.gamma) % 2 != 0) return false;
  }
  return true;
}

const char* active_kernel_name(const ModelSpec& m) {
  return (avx2_supported() && avx2_eligible(m)) ? "avx2" : "scalar";
}

AccumResult accumulate_stats(const double* xs, const double* ys, std::size_t n,
                             double ux, double uy, double R2,
                             const ModelSpec& m, double* out) {
  if (avx2_supported() && avx2_eligible(m))
    return accumulate_stats_avx2(xs, ys, n, ux, uy, R2, m, out);
  return accumulate_stats_scalar(xs, ys, n, ux, uy, R2, m, out);
}

} // namespace gibbs::kernels
