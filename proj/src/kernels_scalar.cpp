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

namespace gibbs::kernels {

AccumResult accumulate_stats_scalar(const double* xs, const double* ys, std::size_t n,
                                    double ux, double uy, double R2,
                                    const ModelSpec& m, double* out) {
  const std::size_t nb = m.basis.size();
  detail::BasisPlan plans[detail::kMaxPlannedBases];
  const bool planned = nb <= static_cast<std::size_t>(detail::kMaxPlannedBases);
  if (planned) {
    for (std::size_t b = 0; b < nb; ++b) plans[b] = detail::make_plan(m.basis[b]);
  }

  AccumResult res;
  for (std::size_t k = 0; k < n; ++k) {
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
    if (planned) {
      for (std::size_t b = 0; b < nb; ++b) out[b] += detail::eval_plan(plans[b], r2, inv);
    } else {
      for (std::size_t b = 0; b < nb; ++b) out[b] += m.basis[b].eval_r2(r2);
    }
  }
  return res;
}

} // namespace gibbs::kernels
