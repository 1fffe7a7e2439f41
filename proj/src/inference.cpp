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

#include <Eigen/Dense>

#include "gibbs/errors.hpp"
#include "gibbs/inference.hpp"
#include "gibbs/numeric.hpp"

namespace gibbs {

namespace {

inline double row_dot_local(const double* row, const double* theta, int p) {
  double a = 0.0;
  for (int j = 0; j < p; ++j) a += theta[j] * row[j];
  return a;
}

FitConfig natural_units(const FitConfig& fc) {
  FitConfig out = fc;
  out.rescale = RescaleMode::None;
  return out;
}

void check_theta(const ModelSpec& m, const ThetaNatural& theta) {
  if (theta.p() != m.p())
    throw std::invalid_argument("theta length does not match the model");
}

int lag_for(double alpha, double side) {
  if (!(alpha > 0.0)) return 1;
  return std::max(1, static_cast<int>(std::ceil(alpha / side)));
}

double resolve_scale(const Configuration& cfg, const ModelSpec& m, const FitConfig& fc) {
  double s = 1.0;
  if (fc.rescale == RescaleMode::Value) s = fc.rescale_value;
  if (fc.rescale == RescaleMode::Auto) s = auto_rescale_value(cfg);
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::invalid_argument("covariance_report: rescale value must be positive and finite");
  if (s != 1.0 && !m.scale_free())
    throw std::invalid_argument(
        "covariance_report: rescaling is exact only for pure power-law bases");
  return s;
}

} // namespace

BlockPartition BlockPartition::build(const Window& eroded, double requested_side) {
  if (!(requested_side > 0.0) || !std::isfinite(requested_side))
    throw std::invalid_argument("BlockPartition: side must be positive and finite");
  BlockPartition bp;
  bp.domain = eroded;
  bp.nx = std::max(1, static_cast<int>(std::lround(eroded.width() / requested_side)));
  bp.ny = std::max(1, static_cast<int>(std::lround(eroded.height() / requested_side)));
  bp.side_x = eroded.width() / bp.nx;
  bp.side_y = eroded.height() / bp.ny;
  return bp;
}

int BlockPartition::block_of(Vec2 u) const {
  int ix = static_cast<int>(std::floor((u.x - domain.lo.x) / side_x));
  int iy = static_cast<int>(std::floor((u.y - domain.lo.y) / side_y));
  ix = std::clamp(ix, 0, nx - 1);
  iy = std::clamp(iy, 0, ny - 1);
  return iy * nx + ix;
}

std::vector<Window> BlockPartition::blocks() const {
  std::vector<Window> out;
  out.reserve(static_cast<std::size_t>(count()));
  for (int iy = 0; iy < ny; ++iy) {
    const double y0 = domain.lo.y + iy * side_y;
    const double y1 = iy + 1 == ny ? domain.hi.y : domain.lo.y + (iy + 1) * side_y;
    for (int ix = 0; ix < nx; ++ix) {
      const double x0 = domain.lo.x + ix * side_x;
      const double x1 = ix + 1 == nx ? domain.hi.x : domain.lo.x + (ix + 1) * side_x;
      out.push_back(Window{{x0, y0}, {x1, y1}});
    }
  }
  return out;
}

double default_block_side(double alpha) { return alpha > 0.0 ? alpha : 1.0; }

std::vector<double> estimate_U(const Configuration& cfg, const ModelSpec& m,
                               const ThetaNatural& theta, const FitConfig& fc) {
  check_theta(m, theta);
  std::vector<double> u = hessian(cfg, m, theta, fc);
  const double a = area(erode(cfg.window(), fc.alpha));
  for (double& v : u) v /= a;
  return u;
}

std::vector<double> estimate_Sigma_block(const Configuration& cfg, const ModelSpec& m,
                                         const ThetaNatural& theta, const FitConfig& fc,
                                         const BlockPartition& bp) {
  check_theta(m, theta);
  const Design d = build_design(cfg, m, natural_units(fc));
  const int p = d.p;
  const std::size_t sp = static_cast<std::size_t>(p);
  const int nblocks = bp.count();
  const bool lr = fc.contrast == ContrastKind::LR;
  const double rho = lr ? (fc.rho > 0.0 ? fc.rho : default_rho(cfg)) : 0.0;
  const double logrho = lr ? std::log(rho) : 0.0;

  // Per-block score contributions, accumulated in row order.
  std::vector<double> scores(static_cast<std::size_t>(nblocks) * sp, 0.0);
  for (std::size_t qrow = 0; qrow < d.quad_pts.size(); ++qrow) {
    const double* row = d.quad_stats.data() + qrow * sp;
    const double a = -row_dot_local(row, theta.v.data(), p);
    double wgt;
    if (lr) {
      if (std::isnan(a) || a == -std::numeric_limits<double>::infinity()) continue;
      wgt = d.weight * rho / (1.0 + std::exp(logrho - a));
    } else {
      wgt = std::isnan(a) ? 0.0 : d.weight * std::exp(a);
      if (wgt == 0.0) continue;
    }
    double* acc = scores.data() + static_cast<std::size_t>(bp.block_of(d.quad_pts[qrow])) * sp;
    for (int j = 0; j < p; ++j) acc[static_cast<std::size_t>(j)] += row[j] * wgt;
  }
  for (std::size_t i = 0; i < d.n_in; ++i) {
    const double* row = d.data_stats.data() + i * sp;
    double wgt = 1.0;
    if (lr) {
      const double a = -row_dot_local(row, theta.v.data(), p);
      wgt = 1.0 / (1.0 + std::exp(a - logrho));
    }
    double* acc = scores.data() + static_cast<std::size_t>(bp.block_of(d.data_pts[i])) * sp;
    for (int j = 0; j < p; ++j) acc[static_cast<std::size_t>(j)] -= row[j] * wgt;
  }

  std::vector<double> mean(sp, 0.0);
  for (int b = 0; b < nblocks; ++b)
    for (std::size_t j = 0; j < sp; ++j) mean[j] += scores[static_cast<std::size_t>(b) * sp + j];
  for (std::size_t j = 0; j < sp; ++j) mean[j] /= static_cast<double>(nblocks);
  for (int b = 0; b < nblocks; ++b)
    for (std::size_t j = 0; j < sp; ++j) scores[static_cast<std::size_t>(b) * sp + j] -= mean[j];

  const int lag_x = lag_for(fc.alpha, bp.side_x);
  const int lag_y = lag_for(fc.alpha, bp.side_y);
  std::vector<double> sigma(sp * sp, 0.0);
  for (int jy = 0; jy < bp.ny; ++jy)
    for (int jx = 0; jx < bp.nx; ++jx) {
      const double* zj = scores.data() + static_cast<std::size_t>(jy * bp.nx + jx) * sp;
      for (int ky = std::max(0, jy - lag_y); ky <= std::min(bp.ny - 1, jy + lag_y); ++ky)
        for (int kx = std::max(0, jx - lag_x); kx <= std::min(bp.nx - 1, jx + lag_x); ++kx) {
          const double* zk = scores.data() + static_cast<std::size_t>(ky * bp.nx + kx) * sp;
          for (std::size_t j = 0; j < sp; ++j)
            for (std::size_t k = 0; k < sp; ++k) sigma[j * sp + k] += zj[j] * zk[k];
        }
    }
  const double a = d.area_natural;
  for (std::size_t j = 0; j < sp; ++j)
    for (std::size_t k = j; k < sp; ++k) {
      const double v = 0.5 * (sigma[j * sp + k] + sigma[k * sp + j]) / a;
      sigma[j * sp + k] = v;
      sigma[k * sp + j] = v;
    }
  return sigma;
}

std::vector<double> sandwich(const std::vector<double>& U, const std::vector<double>& Sigma,
                             double area, int p, bool* psd_projected) {
  if (psd_projected != nullptr) *psd_projected = false;
  if (!(area > 0.0)) throw std::invalid_argument("sandwich: area must be positive");
  using Matrix = Eigen::MatrixXd;
  Matrix um(p, p), sm(p, p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) {
      um(j, k) = U[static_cast<std::size_t>(j * p + k)];
      sm(j, k) = Sigma[static_cast<std::size_t>(j * p + k)];
    }
  um = 0.5 * (um + um.transpose()).eval();
  sm = 0.5 * (sm + sm.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> ues(um);
  if (ues.info() != Eigen::Success)
    throw SingularU("sandwich: eigendecomposition of U failed");
  const double lo = ues.eigenvalues()(0);
  const double hi = ues.eigenvalues()(p - 1);
  if (!(lo > 0.0) || !(hi / lo < 1e12))
    throw SingularU("sandwich: U is singular or has condition number >= 1e12");
  const Matrix uinv = ues.eigenvectors() *
                      ues.eigenvalues().cwiseInverse().asDiagonal() *
                      ues.eigenvectors().transpose();

  Matrix s = (uinv * sm * uinv) / area;
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> ses(s);
  if (ses.info() == Eigen::Success && ses.eigenvalues()(0) < 0.0) {
    if (psd_projected != nullptr) *psd_projected = true;
    Eigen::VectorXd ev = ses.eigenvalues().cwiseMax(0.0);
    s = ses.eigenvectors() * ev.asDiagonal() * ses.eigenvectors().transpose();
  }

  std::vector<double> out(static_cast<std::size_t>(p) * static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) out[static_cast<std::size_t>(j * p + k)] = s(j, k);
  return out;
}

CovarianceReport covariance_report(const Configuration& cfg, const ModelSpec& m,
                                   const ThetaNatural& theta, const FitConfig& fc,
                                   double block_side) {
  check_theta(m, theta);
  CovarianceReport rep;
  rep.p = m.p();
  const Window er = erode(cfg.window(), fc.alpha);
  const double side = block_side > 0.0 ? block_side : default_block_side(fc.alpha);
  const BlockPartition bp = BlockPartition::build(er, side);
  rep.blocks = bp.count();
  rep.lag = std::max(lag_for(fc.alpha, bp.side_x), lag_for(fc.alpha, bp.side_y));
  rep.U = estimate_U(cfg, m, theta, fc);
  if (bp.count() < 9) {
    rep.valid = false;
    rep.reason = "TooFewBlocks";
    return rep;
  }
  rep.Sigma = estimate_Sigma_block(cfg, m, theta, fc, bp);

  // Natural-unit LJ statistics span many orders of magnitude, so the
  // inversion runs in rescaled units and maps back, which is exact algebra.
  const double s = resolve_scale(cfg, m, fc);
  const int p = rep.p;
  const std::size_t sp = static_cast<std::size_t>(p);
  std::vector<double> f(sp, 1.0);
  for (std::size_t b = 0; b + 1 < sp; ++b) f[b + 1] = std::pow(s, m.basis[b].gamma);
  std::vector<double> uprime(sp * sp), sprime(sp * sp);
  for (std::size_t j = 0; j < sp; ++j)
    for (std::size_t k = 0; k < sp; ++k) {
      const double scale_jk = s * s * f[j] * f[k];
      uprime[j * sp + k] = scale_jk * rep.U[j * sp + k];
      sprime[j * sp + k] = scale_jk * rep.Sigma[j * sp + k];
    }
  try {
    bool projected = false;
    const std::vector<double> sw =
        sandwich(uprime, sprime, area(er) / (s * s), p, &projected);
    rep.sandwich.resize(sp * sp);
    for (std::size_t j = 0; j < sp; ++j)
      for (std::size_t k = 0; k < sp; ++k)
        rep.sandwich[j * sp + k] = f[j] * f[k] * sw[j * sp + k];
    rep.psd_projected = projected;
    rep.valid = true;
  } catch (const SingularU&) {
    rep.valid = false;
    rep.reason = "SingularU";
  }
  return rep;
}

std::vector<double> gnz_residual(const Configuration& cfg, const ModelSpec& m,
                                 const ThetaNatural& theta, const FitConfig& fc,
                                 GNZStatistic stat) {
  check_theta(m, theta);
  const Design d = build_design(cfg, m, natural_units(fc));
  if (stat == GNZStatistic::Unit) {
    const std::vector<double> lam = eval_lambda(d, theta.v);
    const double integral = pairwise_sum(lam.data(), lam.size());
    return {static_cast<double>(d.n_in) - d.weight * integral};
  }
  // With f = t the residual is the data sum minus the weighted integral,
  // which is exactly the negated pseudolikelihood score.
  std::vector<double> s = eval_score(d, theta.v);
  for (double& v : s) v = -v;
  return s;
}

} // namespace gibbs
