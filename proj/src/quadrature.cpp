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

#include <stdexcept>

#include "gibbs/quadrature.hpp"

namespace gibbs {

QuadratureGrid QuadratureGrid::midpoint(const Window& w, int grid) {
  if (grid < 2) throw std::invalid_argument("QuadratureGrid: grid must be at least 2");
  QuadratureGrid q;
  q.domain = w;
  q.nx = grid;
  q.ny = grid;
  const double dx = w.width() / grid;
  const double dy = w.height() / grid;
  q.weight = dx * dy;
  const std::size_t total = static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid);
  q.cx.reserve(total);
  q.cy.reserve(total);
  for (int iy = 0; iy < grid; ++iy) {
    const double cy = w.lo.y + (iy + 0.5) * dy;
    for (int ix = 0; ix < grid; ++ix) {
      q.cx.push_back(w.lo.x + (ix + 0.5) * dx);
      q.cy.push_back(cy);
    }
  }
  return q;
}

} // namespace gibbs
