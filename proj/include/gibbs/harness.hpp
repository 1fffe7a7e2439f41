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

#ifndef GIBBS_HARNESS_HPP
#define GIBBS_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gibbs/estimate.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/model.hpp"
#include "gibbs/simulate.hpp"

namespace gibbs {

// One border-correction regime: a set of erosion radii alpha with either
// R = alpha (truncation equal to erosion) or R = infinity.
struct RegimeSpec {
  std::string name;
  std::vector<double> alphas;
  bool r_equal_alpha = false;      // false means R = infinity
  bool include_zero_erosion = false; // prepend alpha = 0 to the grid
};

// How fits rescale distances: by the experiment's true sigma (the
// conditioning choice used for the reference results), by the data-driven
// proxy, by a fixed value, or not at all.
enum class RescaleBy { TrueSigma, Auto, None, Value };

struct FitOverrides {
  int grid = 100;
  ContrastKind contrast = ContrastKind::PL;
  double rho = 0.0; // <= 0: auto
  RescaleBy rescale = RescaleBy::TrueSigma;
  double rescale_value = 1.0;
  double tol_grad = 1e-8;
  int max_iter = 100;
};

struct MHOverrides {
  std::uint64_t steps = 0;  // 0: default_mh_steps rule
  double p_shift = 1.0 / 3.0;
  double shift_scale = 0.0; // <= 0: true sigma
  double margin = 2.0;
};

struct ExperimentSpec {
  LJParams truth;
  std::vector<Window> windows;
  std::vector<RegimeSpec> regimes;
  int replications = 2;
  std::uint64_t base_seed = 0;
  MHOverrides mh;
  FitOverrides fit;
  std::string out_dir;

  void validate() const; // throws std::invalid_argument
};

ExperimentSpec read_experiment_json(const std::string& path);
void write_experiment_json(const ExperimentSpec& spec, const std::string& path);

// Per-replication estimate in one cell.
struct Estimate {
  int rep = 0;
  bool converged = false;
  bool ok = false; // converged and physically interpretable (beta,sigma,eps)
  double logbeta = 0.0, sigma = 0.0, eps = 0.0;
  std::vector<double> theta;
};

struct CellKey {
  std::string regime;
  int window_idx = 0;
  double alpha = 0.0;
  double R = 0.0; // infinity for the R = inf rule
};

struct CellMetrics {
  int reps_ok = 0;
  int reps_failed = 0;
  bool unreliable = false; // more than 20% of fits failed
  double rwmse = 0.0, rwsb = 0.0, rwv = 0.0;
  double bias_logbeta = 0.0, bias_sigma = 0.0, bias_eps = 0.0;
  double sd_logbeta = 0.0, sd_sigma = 0.0, sd_eps = 0.0;
};

struct Cell {
  CellKey key;
  CellMetrics metrics;
  std::vector<Estimate> estimates; // one per replication, in rep order
};

struct AlphaOpt {
  std::string regime;
  int window_idx = 0;
  double alpha_opt = 0.0;
  bool smallest_alpha_attains_min = false;
};

struct MetricsReport {
  std::vector<Cell> cells; // regime-major, then window, then alpha order
  std::vector<AlphaOpt> alpha_opt; // for regimes with >= 2 alphas
  bool any_unreliable = false;
};

// Weighted error summaries over the ok estimates of one cell:
//   WMSE = mean((logb-logb*)^2)/(logb*)^2 + mean((s-s*)^2)/s*^2
//        + mean((e-e*)^2)/e*^2,
// RWMSE = sqrt(WMSE); RWSB uses squared mean biases, RWV population
// variances (divisor M), so RWMSE^2 = RWSB^2 + RWV^2 holds exactly.
// RWMSE is computed from the raw squared errors, not from the identity.
CellMetrics metrics(const std::vector<Estimate>& estimates, const LJParams& truth,
                    int reps_total);

// Simulates `replications` patterns per window (stream = window_idx<<32 | rep,
// reused across every regime and alpha: common random numbers), fits every
// (regime, window, alpha) cell, and writes report.csv, report.json and
// estimates.csv to out_dir (plus patterns/ when keep_patterns). Failed fits
// are excluded from the metrics and counted. Deterministic for any jobs
// count: replications are the unit of parallelism and all reductions are
// ordered by replication index.
MetricsReport run_experiment(const ExperimentSpec& spec, int jobs, bool keep_patterns,
                             const std::string& out_dir);

// RWMSE as a function of alpha on a fixed (regime, window), from an
// existing report; argmin with ties broken toward smaller alpha.
struct AlphaSweep {
  std::vector<double> alphas;
  std::vector<double> rwmse;
  double alpha_opt = 0.0;
};
AlphaSweep alpha_sweep(const MetricsReport& report, const std::string& regime,
                       int window_idx);

// QQ pairs for one parameter: estimates standardized by their sample
// mean/SD, order statistics matched with standard normal quantiles at
// (i - 0.5)/M, plus the squared Pearson correlation of the pairs.
// Throws DegenerateSD when the sample SD is zero; needs >= 2 values
// (>= 20 for a meaningful diagnostic).
struct QQData {
  std::vector<double> quantile;
  std::vector<double> standardized;
  double r_squared = 0.0;
};
QQData qq_data(const std::vector<double>& estimates);

// Two-column CSV (normal_quantile, standardized_estimate).
void write_qq_csv(const QQData& qq, const std::string& path);

// Formats a window as x0:x1:y0:y1 (the report.csv cell syntax).
std::string format_window(const Window& w);
Window parse_window(const std::string& s);

// estimates.csv access for the qq subcommand.
struct EstimateRow {
  std::string regime;
  std::string window;
  double alpha = 0.0;
  double R = 0.0;
  int rep = 0;
  bool converged = false;
  bool ok = false;
  double logbeta = 0.0, sigma = 0.0, eps = 0.0;
};
std::vector<EstimateRow> read_estimates_csv(const std::string& path);

} // namespace gibbs

#endif // GIBBS_HARNESS_HPP
