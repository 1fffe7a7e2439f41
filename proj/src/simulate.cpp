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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gibbs/errors.hpp"
#include "gibbs/kernels.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/simulate.hpp"

namespace gibbs {

std::uint64_t default_mh_steps(double beta, double area_extended) {
  const double expected = beta * area_extended;
  if (!std::isfinite(expected) || expected <= 0.0) return 100000;
  return std::max<std::uint64_t>(100000, 200 * static_cast<std::uint64_t>(std::ceil(expected)));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Local energy of a point at (ux, uy) against the first n_use stored points.
// Coincident points count as infinite energy for every model, including the
// Poisson one; this rejects the measure-zero proposals that would otherwise
// create exact duplicates.
struct EnergyEval {
  const ModelSpec& m;
  const ThetaNatural& theta;
  const std::vector<double>& xs;
  const std::vector<double>& ys;

  double operator()(double ux, double uy, std::size_t n_use) const {
    const std::size_t nb = m.basis.size();
    double sums[16] = {0.0};
    const kernels::AccumResult res =
        kernels::accumulate_stats(xs.data(), ys.data(), n_use, ux, uy, kInf, m, sums);
    if (res.zero_hits > 0) return kInf;
    double energy = 0.0;
    for (std::size_t b = 0; b < nb; ++b) energy += theta.v[b + 1] * sums[b];
    if (std::isnan(energy)) energy = kInf;
    return energy;
  }
};

} // namespace

Configuration mh_run(const ModelSpec& m, const ThetaNatural& theta,
                     const Window& target, const MHConfig& cfg,
                     std::uint64_t stream) {
  m.validate();
  validate_natural(m, theta);
  if (m.basis.size() > 16)
    throw std::invalid_argument("mh_run: at most 16 basis terms supported");
  if (cfg.n_steps == 0)
    throw NonErgodicConfig("mh_run: a zero-step chain cannot reach the stationary law");
  if (!(cfg.p_shift >= 0.0) || !(cfg.p_shift <= 1.0))
    throw std::invalid_argument("mh_run: p_shift must lie in [0, 1]");
  if (cfg.p_shift >= 1.0)
    throw NonErgodicConfig("mh_run: move-only proposals cannot change the point count");
  if (!(cfg.shift_scale > 0.0))
    throw std::invalid_argument("mh_run: shift_scale must be positive");
  if (!(cfg.margin >= 0.0) || !std::isfinite(cfg.margin))
    throw std::invalid_argument("mh_run: margin must be finite and nonnegative");

  const Window S = expand(target, cfg.margin);
  const double area_s = area(S);
  const double beta = std::exp(-theta.v[0]);

  RandomStream rng(cfg.seed, stream);
  std::vector<double> xs;
  std::vector<double> ys;
  const std::size_t guess = static_cast<std::size_t>(
      std::min(2.0 * beta * area_s + 16.0, 1.0e7));
  xs.reserve(guess);
  ys.reserve(guess);
  const EnergyEval energy{m, theta, xs, ys};

  for (std::uint64_t step = 0; step < cfg.n_steps; ++step) {
    const double branch = rng.uniform();
    std::size_t n = xs.size();
    if (branch < cfg.p_shift) {
      if (n == 0) continue;
      std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
      if (j >= n) j = n - 1;
      const double nx = xs[j] + cfg.shift_scale * rng.normal();
      const double ny = ys[j] + cfg.shift_scale * rng.normal();
      if (!S.contains(Vec2{nx, ny})) continue;
      // Park the victim in the last slot so both energies run over a prefix.
      std::swap(xs[j], xs[n - 1]);
      std::swap(ys[j], ys[n - 1]);
      const double e_old = energy(xs[n - 1], ys[n - 1], n - 1);
      const double e_new = energy(nx, ny, n - 1);
      // Ratio lambda(new)/lambda(old); beta cancels.
      const double log_ratio = e_old - e_new;
      if (rng.uniform() < std::exp(log_ratio)) {
        xs[n - 1] = nx;
        ys[n - 1] = ny;
      }
      std::swap(xs[j], xs[n - 1]);
      std::swap(ys[j], ys[n - 1]);
    } else if (rng.uniform() < 0.5) {
      const double nx = rng.uniform(S.lo.x, S.hi.x);
      const double ny = rng.uniform(S.lo.y, S.hi.y);
      const double lambda = beta * std::exp(-energy(nx, ny, n));
      const double ratio = lambda * area_s / static_cast<double>(n + 1);
      if (rng.uniform() < ratio) {
        xs.push_back(nx);
        ys.push_back(ny);
      }
    } else {
      if (n == 0) continue;
      std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
      if (j >= n) j = n - 1;
      std::swap(xs[j], xs[n - 1]);
      std::swap(ys[j], ys[n - 1]);
      const double lambda = beta * std::exp(-energy(xs[n - 1], ys[n - 1], n - 1));
      const double ratio = static_cast<double>(n) / (lambda * area_s);
      if (rng.uniform() < ratio) {
        xs.pop_back();
        ys.pop_back();
      }
    }
  }

  std::vector<Vec2> pts;
  pts.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) pts.push_back(Vec2{xs[k], ys[k]});
  return Configuration(std::move(pts), S);
}

Configuration mh_sample(const ModelSpec& m, const ThetaNatural& theta,
                        const Window& target, const MHConfig& cfg,
                        std::uint64_t stream) {
  return clip(mh_run(m, theta, target, cfg, stream), target);
}

Configuration clip(const Configuration& cfg, const Window& target) {
  const Window& w = cfg.window();
  if (!(target.lo.x >= w.lo.x && target.hi.x <= w.hi.x &&
        target.lo.y >= w.lo.y && target.hi.y <= w.hi.y))
    throw WindowMismatch("clip: target window extends beyond the configuration window");
  std::vector<Vec2> pts;
  for (std::size_t k = 0; k < cfg.size(); ++k) {
    const Vec2 v{cfg.xs()[k], cfg.ys()[k]};
    if (target.contains(v)) pts.push_back(v);
  }
  return Configuration(std::move(pts), target);
}

} // namespace gibbs
