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
#include <atomic>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "gibbs/errors.hpp"
#include "gibbs/estimate.hpp"
#include "gibbs/kernels.hpp"
#include "gibbs/numeric.hpp"
#include "gibbs/parallel.hpp"

namespace gibbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fixed-size chunks plus a fixed combination order make every reduction
// reproduce the same bytes for any worker count.
constexpr std::size_t kChunk = 256;

std::vector<double> chunked_accumulate(std::size_t nrows, std::size_t dim, int workers,
                                       const std::function<void(std::size_t, double*)>& row_fn) {
  std::vector<double> out(dim, 0.0);
  if (nrows == 0 || dim == 0) return out;
  const std::size_t nchunks = (nrows + kChunk - 1) / kChunk;
  std::vector<double> partials(nchunks * dim, 0.0);
  parallel_for(nchunks, workers, [&](std::size_t c) {
    double* acc = partials.data() + c * dim;
    // Neumaier compensation within the chunk: the optimizer's final steps
    // change the sums by less than plain running error, so uncompensated
    // accumulation would widen the flat region around every maximizer.
    thread_local std::vector<double> comp, row;
    comp.assign(dim, 0.0);
    row.resize(dim);
    const std::size_t hi = std::min(nrows, (c + 1) * kChunk);
    for (std::size_t r = c * kChunk; r < hi; ++r) {
      std::fill(row.begin(), row.end(), 0.0);
      row_fn(r, row.data());
      for (std::size_t j = 0; j < dim; ++j) {
        const double t = acc[j] + row[j];
        if (std::abs(acc[j]) >= std::abs(row[j]))
          comp[j] += (acc[j] - t) + row[j];
        else
          comp[j] += (row[j] - t) + acc[j];
        acc[j] = t;
      }
    }
    for (std::size_t j = 0; j < dim; ++j) {
      // Infinite sums keep their sign; the compensation term is NaN there.
      if (std::isfinite(acc[j]) && std::isfinite(comp[j])) acc[j] += comp[j];
    }
  });
  std::vector<double> column(nchunks);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t c = 0; c < nchunks; ++c) column[c] = partials[c * dim + j];
    out[j] = pairwise_sum(column.data(), nchunks);
  }
  return out;
}

inline double row_dot(const double* row, const double* theta, int p) {
  double a = 0.0;
  for (int j = 0; j < p; ++j) a += theta[j] * row[j];
  return a;
}

// lambda = exp(a) with a = -theta^T t; NaN energies (0 * inf products from
// overflowed statistics) resolve to lambda = 0, the Phi(0+) = +inf limit.
inline double lambda_of(double a) { return std::isnan(a) ? 0.0 : std::exp(a); }

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool lj_shaped(const ModelSpec& m) {
  return m.basis.size() == 2 &&
         m.basis[0].form == BasisForm::PowerLaw && m.basis[0].gamma == 12.0 &&
         m.basis[1].form == BasisForm::PowerLaw && m.basis[1].gamma == 6.0;
}

} // namespace

Design build_design(const Configuration& cfg, const ModelSpec& m, const FitConfig& fc) {
  m.validate();
  if (fc.grid < 2) throw std::invalid_argument("build_design: grid must be at least 2");
  if (!(fc.alpha >= 0.0) || !std::isfinite(fc.alpha))
    throw std::invalid_argument("build_design: alpha must be finite and nonnegative");
  if (!(fc.R > 0.0)) throw std::invalid_argument("build_design: R must be positive");

  Window er{{0.0, 0.0}, {1.0, 1.0}};
  try {
    er = erode(cfg.window(), fc.alpha);
  } catch (const EmptyErosion& e) {
    throw DegenerateErosion(e.what());
  }

  double s = 1.0;
  if (fc.rescale == RescaleMode::Value) s = fc.rescale_value;
  if (fc.rescale == RescaleMode::Auto) s = auto_rescale_value(cfg);
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::invalid_argument("build_design: rescale value must be positive and finite");
  if (s != 1.0 && !m.scale_free())
    throw std::invalid_argument(
        "build_design: rescaling is exact only for pure power-law bases");

  const int p = m.p();
  Design d;
  d.p = p;
  d.scale = s;
  d.eroded = er;
  d.area_natural = area(er);
  d.area = d.area_natural / (s * s);
  d.n_total = cfg.size();
  for (const BasisFunction& b : m.basis) d.gammas.push_back(b.gamma);

  const QuadratureGrid q = QuadratureGrid::midpoint(er, fc.grid);
  d.weight = q.weight / (s * s);
  const std::size_t nq = q.cx.size();
  d.quad_pts.resize(nq);
  for (std::size_t k = 0; k < nq; ++k) d.quad_pts[k] = Vec2{q.cx[k], q.cy[k]};

  const std::vector<double>& xs = cfg.xs();
  const std::vector<double>& ys = cfg.ys();
  for (std::size_t k = 0; k < cfg.size(); ++k) {
    const Vec2 u{xs[k], ys[k]};
    if (er.contains(u)) d.data_pts.push_back(u);
  }
  d.n_in = d.data_pts.size();

  std::vector<double> factor(m.basis.size());
  for (std::size_t b = 0; b < factor.size(); ++b) factor[b] = std::pow(s, m.basis[b].gamma);

  const bool finite_r = std::isfinite(fc.R);
  const double r2 = fc.R * fc.R;
  std::optional<RangeIndex> index;
  if (finite_r) index.emplace(cfg, fc.R);

  d.data_stats.assign(d.n_in * static_cast<std::size_t>(p), 0.0);
  d.quad_stats.assign(nq * static_cast<std::size_t>(p), 0.0);

  // exclude_self: at a data point the coincident hit is the point itself and
  // is dropped; a quadrature midpoint landing exactly on a data point gets
  // infinite statistics, the lambda = 0 limit.
  auto fill_row = [&](Vec2 u, double* row, bool exclude_self) {
    row[0] = 1.0;
    double* sums = row + 1;
    kernels::AccumResult res;
    if (!finite_r) {
      res = kernels::accumulate_stats(xs.data(), ys.data(), cfg.size(), u.x, u.y, kInf, m, sums);
    } else {
      thread_local std::vector<std::uint32_t> hits;
      thread_local std::vector<double> sx, sy;
      hits.clear();
      index->query(u, hits);
      sx.resize(hits.size());
      sy.resize(hits.size());
      for (std::size_t h = 0; h < hits.size(); ++h) {
        sx[h] = xs[hits[h]];
        sy[h] = ys[hits[h]];
      }
      res = kernels::accumulate_stats(sx.data(), sy.data(), hits.size(), u.x, u.y, r2, m, sums);
    }
    if (!exclude_self && res.zero_hits > 0)
      for (std::size_t b = 0; b + 1 < static_cast<std::size_t>(p); ++b) sums[b] = kInf;
    if (s != 1.0)
      for (std::size_t b = 0; b + 1 < static_cast<std::size_t>(p); ++b) sums[b] *= factor[b];
  };

  parallel_for(d.n_in, fc.workers, [&](std::size_t i) {
    fill_row(d.data_pts[i], d.data_stats.data() + i * static_cast<std::size_t>(p), true);
  });
  parallel_for(nq, fc.workers, [&](std::size_t qrow) {
    fill_row(d.quad_pts[qrow], d.quad_stats.data() + qrow * static_cast<std::size_t>(p), false);
  });
  return d;
}

std::vector<double> theta_to_working(const Design& d, const ThetaNatural& theta) {
  if (theta.p() != d.p) throw std::invalid_argument("theta_to_working: wrong length");
  std::vector<double> w = theta.v;
  if (d.scale == 1.0) return w;
  w[0] -= 2.0 * std::log(d.scale);
  for (std::size_t b = 0; b < d.gammas.size(); ++b)
    w[b + 1] *= std::pow(d.scale, -d.gammas[b]);
  return w;
}

ThetaNatural theta_to_natural(const Design& d, const std::vector<double>& working) {
  if (static_cast<int>(working.size()) != d.p)
    throw std::invalid_argument("theta_to_natural: wrong length");
  ThetaNatural theta{working};
  if (d.scale == 1.0) return theta;
  theta.v[0] += 2.0 * std::log(d.scale);
  for (std::size_t b = 0; b < d.gammas.size(); ++b)
    theta.v[b + 1] *= std::pow(d.scale, d.gammas[b]);
  return theta;
}

double eval_lpl(const Design& d, const std::vector<double>& theta, bool* nonfinite) {
  if (nonfinite != nullptr) *nonfinite = false;
  const int p = d.p;
  std::atomic<bool> bad{false};
  const std::vector<double> data = chunked_accumulate(
      d.n_in, 1, 1, [&](std::size_t i, double* acc) {
        const double a = -row_dot(d.data_stats.data() + i * static_cast<std::size_t>(p),
                                  theta.data(), p);
        if (!std::isfinite(a)) bad.store(true, std::memory_order_relaxed);
        acc[0] += a;
      });
  const std::vector<double> integral = chunked_accumulate(
      d.quad_pts.size(), 1, 1, [&](std::size_t qrow, double* acc) {
        acc[0] += lambda_of(-row_dot(d.quad_stats.data() + qrow * static_cast<std::size_t>(p),
                                     theta.data(), p));
      });
  if (bad.load()) {
    if (nonfinite != nullptr) *nonfinite = true;
    return -kInf;
  }
  const double value = data[0] - d.weight * integral[0];
  return std::isnan(value) ? -kInf : value;
}

double eval_lrl(const Design& d, const std::vector<double>& theta, double rho,
                bool* nonfinite) {
  if (nonfinite != nullptr) *nonfinite = false;
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("eval_lrl: rho must be positive and finite");
  const int p = d.p;
  const double lr = std::log(rho);
  std::atomic<bool> bad{false};
  const std::vector<double> data = chunked_accumulate(
      d.n_in, 1, 1, [&](std::size_t i, double* acc) {
        const double a = -row_dot(d.data_stats.data() + i * static_cast<std::size_t>(p),
                                  theta.data(), p);
        if (!std::isfinite(a)) {
          bad.store(true, std::memory_order_relaxed);
          return;
        }
        acc[0] += a - logaddexp(a, lr);
      });
  const std::vector<double> integral = chunked_accumulate(
      d.quad_pts.size(), 1, 1, [&](std::size_t qrow, double* acc) {
        const double a = -row_dot(d.quad_stats.data() + qrow * static_cast<std::size_t>(p),
                                  theta.data(), p);
        if (std::isnan(a) || a == -kInf) return; // lambda = 0 contributes nothing
        acc[0] += logaddexp(a, lr) - lr;
      });
  if (bad.load()) {
    if (nonfinite != nullptr) *nonfinite = true;
    return -kInf;
  }
  const double value = data[0] - d.weight * rho * integral[0];
  return std::isnan(value) ? -kInf : value;
}

std::vector<double> eval_score(const Design& d, const std::vector<double>& theta) {
  const int p = d.p;
  const std::vector<double> integral = chunked_accumulate(
      d.quad_pts.size(), static_cast<std::size_t>(p), 1, [&](std::size_t qrow, double* acc) {
        const double* row = d.quad_stats.data() + qrow * static_cast<std::size_t>(p);
        const double lam = lambda_of(-row_dot(row, theta.data(), p));
        if (lam == 0.0) return;
        for (int j = 0; j < p; ++j) acc[j] += row[j] * lam;
      });
  const std::vector<double> data = chunked_accumulate(
      d.n_in, static_cast<std::size_t>(p), 1, [&](std::size_t i, double* acc) {
        const double* row = d.data_stats.data() + i * static_cast<std::size_t>(p);
        for (int j = 0; j < p; ++j) acc[j] += row[j];
      });
  std::vector<double> s(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) s[static_cast<std::size_t>(j)] =
      d.weight * integral[static_cast<std::size_t>(j)] - data[static_cast<std::size_t>(j)];
  return s;
}

std::vector<double> eval_hessian(const Design& d, const std::vector<double>& theta) {
  const int p = d.p;
  const std::size_t dim = static_cast<std::size_t>(p) * static_cast<std::size_t>(p);
  std::vector<double> h = chunked_accumulate(
      d.quad_pts.size(), dim, 1, [&](std::size_t qrow, double* acc) {
        const double* row = d.quad_stats.data() + qrow * static_cast<std::size_t>(p);
        const double lam = lambda_of(-row_dot(row, theta.data(), p));
        if (lam == 0.0) return;
        for (int j = 0; j < p; ++j) {
          const double rj = row[j] * lam;
          for (int k = j; k < p; ++k) acc[j * p + k] += rj * row[k];
        }
      });
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < j; ++k) h[static_cast<std::size_t>(j * p + k)] =
        h[static_cast<std::size_t>(k * p + j)];
  for (double& v : h) v *= d.weight;
  return h;
}

std::vector<double> eval_score_lr(const Design& d, const std::vector<double>& theta, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("eval_score_lr: rho must be positive and finite");
  const int p = d.p;
  const double lr = std::log(rho);
  const std::vector<double> integral = chunked_accumulate(
      d.quad_pts.size(), static_cast<std::size_t>(p), 1, [&](std::size_t qrow, double* acc) {
        const double* row = d.quad_stats.data() + qrow * static_cast<std::size_t>(p);
        const double a = -row_dot(row, theta.data(), p);
        if (std::isnan(a) || a == -kInf) return;
        const double wgt = sigmoid(a - lr);
        for (int j = 0; j < p; ++j) acc[j] += row[j] * wgt;
      });
  const std::vector<double> data = chunked_accumulate(
      d.n_in, static_cast<std::size_t>(p), 1, [&](std::size_t i, double* acc) {
        const double* row = d.data_stats.data() + i * static_cast<std::size_t>(p);
        const double a = -row_dot(row, theta.data(), p);
        const double wgt = sigmoid(lr - a);
        for (int j = 0; j < p; ++j) acc[j] += row[j] * wgt;
      });
  std::vector<double> s(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) s[static_cast<std::size_t>(j)] =
      d.weight * rho * integral[static_cast<std::size_t>(j)] - data[static_cast<std::size_t>(j)];
  return s;
}

std::vector<double> eval_hessian_lr(const Design& d, const std::vector<double>& theta,
                                    double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("eval_hessian_lr: rho must be positive and finite");
  const int p = d.p;
  const double lr = std::log(rho);
  const std::size_t dim = static_cast<std::size_t>(p) * static_cast<std::size_t>(p);
  auto weighted_outer = [&](const double* row, double wgt, double* acc) {
    for (int j = 0; j < p; ++j) {
      const double rj = row[j] * wgt;
      for (int k = j; k < p; ++k) acc[j * p + k] += rj * row[k];
    }
  };
  std::vector<double> h = chunked_accumulate(
      d.n_in, dim, 1, [&](std::size_t i, double* acc) {
        const double* row = d.data_stats.data() + i * static_cast<std::size_t>(p);
        const double a = -row_dot(row, theta.data(), p);
        if (!std::isfinite(a)) return;
        weighted_outer(row, sigmoid(a - lr) * sigmoid(lr - a), acc);
      });
  const std::vector<double> integral = chunked_accumulate(
      d.quad_pts.size(), dim, 1, [&](std::size_t qrow, double* acc) {
        const double* row = d.quad_stats.data() + qrow * static_cast<std::size_t>(p);
        const double a = -row_dot(row, theta.data(), p);
        if (!std::isfinite(a)) return;
        weighted_outer(row, sigmoid(a - lr) * sigmoid(lr - a), acc);
      });
  for (std::size_t j = 0; j < dim; ++j) h[j] += d.weight * rho * integral[j];
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < j; ++k) h[static_cast<std::size_t>(j * p + k)] =
        h[static_cast<std::size_t>(k * p + j)];
  return h;
}

std::vector<double> eval_lambda(const Design& d, const std::vector<double>& theta) {
  const int p = d.p;
  std::vector<double> lam(d.quad_pts.size());
  for (std::size_t qrow = 0; qrow < lam.size(); ++qrow)
    lam[qrow] = lambda_of(-row_dot(d.quad_stats.data() + qrow * static_cast<std::size_t>(p),
                                   theta.data(), p));
  return lam;
}

namespace {

FitConfig natural_units(const FitConfig& fc) {
  FitConfig out = fc;
  out.rescale = RescaleMode::None;
  return out;
}

void check_theta(const ModelSpec& m, const ThetaNatural& theta) {
  if (theta.p() != m.p())
    throw std::invalid_argument("theta length does not match the model");
}

} // namespace

double lpl(const Configuration& cfg, const ModelSpec& m, const ThetaNatural& theta,
           const FitConfig& fc, bool* nonfinite) {
  check_theta(m, theta);
  const Design d = build_design(cfg, m, natural_units(fc));
  return eval_lpl(d, theta.v, nonfinite);
}

double lrl(const Configuration& cfg, const ModelSpec& m, const ThetaNatural& theta,
           const FitConfig& fc, bool* nonfinite) {
  check_theta(m, theta);
  const Design d = build_design(cfg, m, natural_units(fc));
  const double rho = fc.rho > 0.0 ? fc.rho : default_rho(cfg);
  return eval_lrl(d, theta.v, rho, nonfinite);
}

std::vector<double> score(const Configuration& cfg, const ModelSpec& m,
                          const ThetaNatural& theta, const FitConfig& fc) {
  check_theta(m, theta);
  const Design d = build_design(cfg, m, natural_units(fc));
  if (fc.contrast == ContrastKind::LR)
    return eval_score_lr(d, theta.v, fc.rho > 0.0 ? fc.rho : default_rho(cfg));
  return eval_score(d, theta.v);
}

std::vector<double> hessian(const Configuration& cfg, const ModelSpec& m,
                            const ThetaNatural& theta, const FitConfig& fc) {
  check_theta(m, theta);
  const Design d = build_design(cfg, m, natural_units(fc));
  if (fc.contrast == ContrastKind::LR)
    return eval_hessian_lr(d, theta.v, fc.rho > 0.0 ? fc.rho : default_rho(cfg));
  return eval_hessian(d, theta.v);
}

ThetaNatural default_init(const Configuration& cfg, const ModelSpec& m, const FitConfig& fc) {
  Window er{{0.0, 0.0}, {1.0, 1.0}};
  try {
    er = erode(cfg.window(), fc.alpha);
  } catch (const EmptyErosion& e) {
    throw DegenerateErosion(e.what());
  }
  std::size_t n_in = 0;
  for (std::size_t k = 0; k < cfg.size(); ++k)
    if (er.contains(Vec2{cfg.xs()[k], cfg.ys()[k]})) ++n_in;
  const double area_er = area(er);
  const double beta0 = (n_in > 0 ? static_cast<double>(n_in) : 0.5) / area_er;

  ThetaNatural theta;
  theta.v.assign(static_cast<std::size_t>(m.p()), 0.0);
  theta.v[0] = -std::log(beta0);
  if (m.basis.size() == 2 && m.scale_free()) {
    double min_d2 = kInf;
    const std::vector<double>& xs = cfg.xs();
    const std::vector<double>& ys = cfg.ys();
    for (std::size_t i = 0; i < cfg.size(); ++i)
      for (std::size_t j = i + 1; j < cfg.size(); ++j) {
        const double dx = xs[i] - xs[j];
        const double dy = ys[i] - ys[j];
        const double d2 = dx * dx + dy * dy;
        if (d2 < min_d2) min_d2 = d2;
      }
    const double sigma0 =
        std::isfinite(min_d2) ? std::sqrt(min_d2) : 0.05 * cfg.window().min_side();
    theta.v[1] = 4.0 * std::pow(sigma0, m.basis[0].gamma);
    theta.v[2] = -4.0 * std::pow(sigma0, m.basis[1].gamma);
  }
  return theta;
}

double default_rho(const Configuration& cfg) {
  const double n = cfg.size() > 0 ? static_cast<double>(cfg.size()) : 1.0;
  return n / area(cfg.window());
}

double auto_rescale_value(const Configuration& cfg) {
  const std::size_t n = cfg.size();
  if (n < 2) return 1.0;
  const std::vector<double>& xs = cfg.xs();
  const std::vector<double>& ys = cfg.ys();
  std::vector<double> nn(n, kInf);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      const double d2 = dx * dx + dy * dy;
      if (d2 < nn[i]) nn[i] = d2;
      if (d2 < nn[j]) nn[j] = d2;
    }
  std::sort(nn.begin(), nn.end());
  const std::size_t idx = static_cast<std::size_t>(0.01 * static_cast<double>(n - 1));
  return std::sqrt(nn[idx]);
}

FitResult fit(const Configuration& cfg, const ModelSpec& m, const FitConfig& fc,
              const ThetaNatural* theta_init) {
  const Design d = build_design(cfg, m, fc);
  const ThetaNatural theta0 = theta_init != nullptr ? *theta_init : default_init(cfg, m, fc);
  check_theta(m, theta0);

  const bool lr = fc.contrast == ContrastKind::LR;
  const double rho_nat = fc.rho > 0.0 ? fc.rho : default_rho(cfg);
  const double rho = rho_nat * d.scale * d.scale;

  auto contrast_at = [&](const std::vector<double>& t, bool* nf) {
    return lr ? eval_lrl(d, t, rho, nf) : eval_lpl(d, t, nf);
  };
  auto grad_at = [&](const std::vector<double>& t) {
    return lr ? eval_score_lr(d, t, rho) : eval_score(d, t);
  };
  auto hess_at = [&](const std::vector<double>& t) {
    return lr ? eval_hessian_lr(d, t, rho) : eval_hessian(d, t);
  };

  const int p = d.p;
  using Matrix = Eigen::MatrixXd;
  using Vector = Eigen::VectorXd;

  FitResult out;
  out.scale = d.scale;

  std::vector<double> theta = theta_to_working(d, theta0);
  bool nonfinite = false;
  double val = contrast_at(theta, &nonfinite);
  out.nonfinite_energy = nonfinite;
  const double gtol = fc.tol_grad * (1.0 + static_cast<double>(d.n_total));

  // Solves H dir = g; a direction must be finite and an ascent direction.
  // One trace-proportional regularization retry is allowed before giving up.
  auto newton_dir = [&](std::vector<double> h, const Vector& g) {
    Eigen::Map<Matrix> hm(h.data(), p, p);
    auto attempt = [&](const Matrix& a) -> std::optional<Vector> {
      Eigen::LDLT<Matrix> ldlt(a);
      if (ldlt.info() != Eigen::Success) return std::nullopt;
      Vector x = ldlt.solve(g);
      if (!x.allFinite() || !(x.dot(g) > 0.0)) return std::nullopt;
      return x;
    };
    if (auto x = attempt(hm)) return *x;
    out.hessian_regularized = true;
    const double bump = 1e-10 * std::max(hm.trace(), 0.0) + 1e-30;
    Matrix reg = hm + bump * Matrix::Identity(p, p);
    if (auto x = attempt(reg)) return *x;
    throw SingularHessian("fit: Newton system unsolvable even after regularization");
  };

  double gnorm = kInf;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trial(static_cast<std::size_t>(p));

  for (;;) {
    const std::vector<double> s = grad_at(theta);
    gnorm = 0.0;
    bool s_finite = true;
    for (double v : s) {
      if (!std::isfinite(v)) s_finite = false;
      gnorm = std::max(gnorm, std::abs(v));
    }
    if (s_finite && gnorm <= gtol) {
      converged = true;
      break;
    }
    if (!s_finite || !std::isfinite(val) || iterations >= fc.max_iter) break;

    const Vector g = Eigen::Map<const Vector>(s.data(), p);
    const Vector dir = newton_dir(hess_at(theta), g);

    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      for (int j = 0; j < p; ++j)
        trial[static_cast<std::size_t>(j)] = theta[static_cast<std::size_t>(j)] + step * dir(j);
      const double tval = contrast_at(trial, nullptr);
      if (std::isfinite(tval) && tval >= val) {
        theta = trial;
        val = tval;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    ++iterations;
  }

  out.converged = converged;
  out.iterations = iterations;
  out.grad_norm = gnorm;
  out.theta = theta_to_natural(d, theta);
  if (lj_shaped(m)) out.physical = natural_to_lj(out.theta);

  const double lpl_shift = 2.0 * static_cast<double>(d.n_in) * std::log(d.scale);
  out.neg_contrast = lr ? -val : -(val - lpl_shift);

  std::vector<double> h = hess_at(theta);
  if (d.scale != 1.0) {
    std::vector<double> f(static_cast<std::size_t>(p), 1.0);
    for (std::size_t b = 0; b < d.gammas.size(); ++b)
      f[b + 1] = std::pow(d.scale, -d.gammas[b]);
    for (int j = 0; j < p; ++j)
      for (int k = 0; k < p; ++k)
        h[static_cast<std::size_t>(j * p + k)] *=
            f[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(k)];
  }
  out.hessian = std::move(h);
  return out;
}

} // namespace gibbs
