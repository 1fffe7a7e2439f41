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

#ifndef GIBBS_INFERENCE_HPP
#define GIBBS_INFERENCE_HPP

#include <string>
#include <vector>

#include "gibbs/estimate.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/model.hpp"

namespace gibbs {

// Equal tiling of the eroded window used by the block covariance
// estimator. The requested side is rounded so the blocks tile exactly:
// nx = max(1, round(width/side)), actual side = width/nx, and likewise in
// y. Equal blocks keep the grand-mean centering unbiased across blocks.
struct BlockPartition {
  Window domain{{0.0, 0.0}, {1.0, 1.0}};
  int nx = 1, ny = 1;
  double side_x = 1.0, side_y = 1.0;

  static BlockPartition build(const Window& eroded, double requested_side);

  int count() const { return nx * ny; }
  int block_of(Vec2 u) const; // clamped floor; every point maps to one block
  std::vector<Window> blocks() const;
};

// Default block side: alpha when alpha > 0, else 1.
double default_block_side(double alpha);

struct CovarianceReport {
  int p = 0;
  std::vector<double> U;        // p x p, = hessian/area
  std::vector<double> Sigma;    // p x p block estimate of the score variance
  std::vector<double> sandwich; // p x p, U^-1 Sigma U^-1 / area
  bool valid = false;
  bool psd_projected = false; // sandwich had negative eigenvalues clipped
  std::string reason;         // "TooFewBlocks" / "SingularU" when invalid
  int blocks = 0;
  int lag = 0; // block-lattice lag actually used
};

// U = hessian(cfg, m, theta, fc) / area(eroded window); shares the hessian
// code path bit for bit.
std::vector<double> estimate_U(const Configuration& cfg, const ModelSpec& m,
                               const ThetaNatural& theta, const FitConfig& fc);

// Block empirical score covariance: per-block scores s_j, centered at the
// grand mean Z_j = s_j - mean(s), summed over block pairs within lattice
// lag max(1, ceil(alpha/side)) in the uniform norm, symmetrized, divided
// by the eroded area. Works for any block count >= 1; the >= 9 validity
// rule is applied by covariance_report.
std::vector<double> estimate_Sigma_block(const Configuration& cfg, const ModelSpec& m,
                                         const ThetaNatural& theta, const FitConfig& fc,
                                         const BlockPartition& bp);

// U^-1 Sigma U^-1 / area, symmetrized and projected onto the PSD cone
// (negative eigenvalues clipped; *psd_projected set when that happened).
// Throws SingularU when U has a non-positive eigenvalue or condition
// number >= 1e12.
std::vector<double> sandwich(const std::vector<double>& U, const std::vector<double>& Sigma,
                             double area, int p, bool* psd_projected = nullptr);

// One-stop covariance estimate at theta (usually a fitted theta). Uses
// fc.rescale to condition the inversion: U and Sigma are always reported in
// natural units; the sandwich inversion runs in rescaled units and is
// mapped back exactly. block_side <= 0 picks default_block_side(fc.alpha).
// Fewer than 9 blocks or a singular U yield valid = false with U still
// reported.
CovarianceReport covariance_report(const Configuration& cfg, const ModelSpec& m,
                                   const ThetaNatural& theta, const FitConfig& fc,
                                   double block_side = 0.0);

enum class GNZStatistic { Unit, Stats };

// Empirical residual of the integral characterization of the model: sum of
// f over data points in the eroded window minus the lambda-weighted
// integral of f, with f = 1 (returns 1 entry) or f = t truncated at R
// (returns p entries; identically -score by construction, shared code).
// Mean zero at the true theta up to truncation bias.
std::vector<double> gnz_residual(const Configuration& cfg, const ModelSpec& m,
                                 const ThetaNatural& theta, const FitConfig& fc,
                                 GNZStatistic stat);

} // namespace gibbs

#endif // GIBBS_INFERENCE_HPP
