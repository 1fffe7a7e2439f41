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

#ifndef GIBBS_QUADRATURE_HPP
#define GIBBS_QUADRATURE_HPP

#include "gibbs/geometry.hpp"

namespace gibbs {

// Midpoint rule on a grid x grid partition of a rectangle. All cells share
// one weight (the cell area), and midpoints never coincide with generic
// data points, which keeps the integrand finite.
struct QuadratureGrid {
  std::vector<double> cx, cy; // cell centers, x fastest then y
  double weight = 0.0;        // common cell area
  int nx = 0, ny = 0;
  Window domain{{0.0, 0.0}, {1.0, 1.0}};

  std::size_t size() const { return cx.size(); }

  // grid >= 2 subdivisions per axis.
  static QuadratureGrid midpoint(const Window& w, int grid);
};

} // namespace gibbs

#endif // GIBBS_QUADRATURE_HPP
