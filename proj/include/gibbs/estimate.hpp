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

#ifndef GIBBS_ESTIMATE_HPP
#define GIBBS_ESTIMATE_HPP

#include <limits>
#include <optional>
#include <vector>

#include "gibbs/geometry.hpp"
#include "gibbs/model.hpp"
#include "gibbs/quadrature.hpp"

namespace gibbs {

enum class ContrastKind { PL, LR };

enum class RescaleMode { None, Value, Auto };

// Border-correction pair (alpha, R), quadrature resolution, contrast choice
// and optimizer tolerances. `rescale` applies only to fit() and the
// covariance report: it runs the optimizer in units of distance/scale,
// which is an exact reparametrization for pure power-law bases, and maps
// the estimate back. lpl/lrl/score/hessian are always reported in natural
// units.
struct FitConfig {
  double alpha = 0.0;
  double R = std::numeric_limits<double>::infinity();
  int grid = 100;
  ContrastKind contrast = ContrastKind::PL;
  double rho = 0.0; // LR reference rate; <= 0 means auto: n(x)/area(W)
  RescaleMode rescale = RescaleMode::None;
  double rescale_value = 1.0; // used when rescale == Value
  double tol_grad = 1e-8;
  int max_iter = 100;
  int workers = 1;
};

// Precomputed sufficient statistics: rows t(u_i, x \ u_i) for data points
// inside the eroded window and t(c_q, x) for quadrature midpoints. Every
// contrast, score and Hessian evaluation is a weighted reduction over these
// rows, so Newton iterations never touch point pairs again. `scale` > 1 is
// recorded when the rows are in rescaled distance units.
struct Design {
  int p = 1;
  double weight = 0.0;          // quadrature cell area (working units)
  double area = 0.0;            // eroded area (working units)
  double area_natural = 0.0;    // eroded area (natural units)
  std::size_t n_in = 0;         // data points inside the eroded window
  std::size_t n_total = 0;      // all data points
  std::vector<double> data_stats; // n_in x p, row-major
  std::vector<double> quad_stats; // Q x p, row-major
  std::vector<Vec2> data_pts;     // natural coordinates (for block sums)
  std::vector<Vec2> quad_pts;     // natural coordinates
  double scale = 1.0;
  std::vector<double> gammas;     // basis exponents (for parameter maps)
  Window eroded{{0.0, 0.0}, {1.0, 1.0}}; // natural units
};

// Builds the design for (cfg, m, fc). Honors fc.rescale; pass
// RescaleMode::None to stay in natural units. Throws DegenerateErosion
// when erode(window, alpha) fails and std::invalid_argument for a grid < 2
// or a rescale request with a basis that is not scale-free.
Design build_design(const Configuration& cfg, const ModelSpec& m, const FitConfig& fc);

// theta maps between natural units and the design's working units:
// working theta_1 = theta_1 - 2 log(scale), working theta_m = theta_m *
// scale^{-gamma_m}; distances are divided by scale, so statistics grow by
// scale^{gamma_m} and the two effects cancel in theta^T t.
std::vector<double> theta_to_working(const Design& d, const ThetaNatural& theta);
ThetaNatural theta_to_natural(const Design& d, const std::vector<double>& working);

// Reductions over a design, in the design's working units. theta has d.p
// entries. nonfinite (optional) reports a data point with lambda = 0 under
// exclusion; the contrast is then -inf.
double eval_lpl(const Design& d, const std::vector<double>& theta, bool* nonfinite = nullptr);
double eval_lrl(const Design& d, const std::vector<double>& theta, double rho,
                bool* nonfinite = nullptr);
std::vector<double> eval_score(const Design& d, const std::vector<double>& theta);
std::vector<double> eval_hessian(const Design& d, const std::vector<double>& theta);
std::vector<double> eval_score_lr(const Design& d, const std::vector<double>& theta, double rho);
std::vector<double> eval_hessian_lr(const Design& d, const std::vector<double>& theta, double rho);

// Per-quadrature-point lambda values at theta (working units); used by
// residual diagnostics.
std::vector<double> eval_lambda(const Design& d, const std::vector<double>& theta);

// The truncated/eroded contrasts and their exact derivatives in natural
// units (fc.rescale is ignored here). lpl is the log-pseudolikelihood, lrl
// the logistic contrast; score = gradient of lpl, hessian = -its second
// derivative matrix (PSD). For ContrastKind::LR, score/hessian return the
// LR analogues.
double lpl(const Configuration& cfg, const ModelSpec& m, const ThetaNatural& theta,
           const FitConfig& fc, bool* nonfinite = nullptr);
double lrl(const Configuration& cfg, const ModelSpec& m, const ThetaNatural& theta,
           const FitConfig& fc, bool* nonfinite = nullptr);
std::vector<double> score(const Configuration& cfg, const ModelSpec& m,
                          const ThetaNatural& theta, const FitConfig& fc);
std::vector<double> hessian(const Configuration& cfg, const ModelSpec& m,
                            const ThetaNatural& theta, const FitConfig& fc);

struct FitResult {
  ThetaNatural theta;                 // natural units
  std::optional<LJParams> physical;   // present for LJ-shaped estimates
  bool converged = false;
  int iterations = 0;
  double grad_norm = std::numeric_limits<double>::infinity(); // working units
  double neg_contrast = std::numeric_limits<double>::quiet_NaN(); // natural units
  std::vector<double> hessian;        // p x p row-major, natural units
  bool hessian_regularized = false;   // trace regularization was needed
  bool nonfinite_energy = false;      // a data point had lambda = 0 under exclusion
  double scale = 1.0;                 // rescale factor actually used
};

// Default starting point: beta_0 = n(eroded)/area(eroded) (the exact
// Poisson maximizer), and for a two-term power-law basis the classic
// (sigma_0 = min interpoint distance, eps_0 = 1); other bases start from
// the Poisson point theta_m = 0.
ThetaNatural default_init(const Configuration& cfg, const ModelSpec& m, const FitConfig& fc);

// rho default for the logistic contrast: n(x)/area(W).
double default_rho(const Configuration& cfg);

// Scale proxy when fc.rescale == Auto: the 1% quantile of nearest-neighbor
// distances (1.0 when fewer than two points).
double auto_rescale_value(const Configuration& cfg);

// Damped Newton ascent of the chosen contrast: full step halved until the
// contrast does not decrease, stopping when ||score||_inf <=
// tol_grad * (1 + n(x)) or after max_iter sweeps. PL and LR are concave in
// theta, so the maximizer found is global. Throws SingularHessian only if
// the trace-regularized system is still unsolvable.
FitResult fit(const Configuration& cfg, const ModelSpec& m, const FitConfig& fc,
              const ThetaNatural* theta_init = nullptr);

} // namespace gibbs

#endif // GIBBS_ESTIMATE_HPP
