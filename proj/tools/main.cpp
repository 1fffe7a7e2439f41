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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gibbs/errors.hpp"
#include "gibbs/estimate.hpp"
#include "gibbs/harness.hpp"
#include "gibbs/inference.hpp"
#include "gibbs/kernels.hpp"
#include "gibbs/model.hpp"
#include "gibbs/numeric.hpp"
#include "gibbs/pattern_io.hpp"
#include "gibbs/simulate.hpp"

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace gibbs;

constexpr double kInf = std::numeric_limits<double>::infinity();

Window parse_window_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4)
    throw CLI::ValidationError("--window", "expected x0,x1,y0,y1");
  return Window{{parse_double(parts[0]), parse_double(parts[2])},
                {parse_double(parts[1]), parse_double(parts[3])}};
}

double parse_range(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInf;
  return parse_double(s);
}

struct FitFlags {
  std::string pattern_path;
  std::string family = "lj";
  std::vector<double> gammas;
  double alpha = 0.0;
  std::string range = "inf";
  int grid = 100;
  std::string contrast = "pl";
  std::string rho = "auto";
  std::string rescale_by = "none";
  double tol_grad = 1e-8;
  int max_iter = 100;
  bool cov = false;
  double block_side = 0.0;
  std::string out_path = "result.json";
};

ModelSpec model_for_family(const FitFlags& ff) {
  if (ff.family == "lj") return ModelSpec::lennard_jones();
  if (ff.family == "poisson") return ModelSpec::poisson();
  if (ff.family == "powerlaw") {
    if (ff.gammas.empty())
      throw CLI::ValidationError("--gammas", "powerlaw needs at least one exponent");
    return ModelSpec::power_law(ff.gammas);
  }
  throw CLI::ValidationError("--model-family", "must be lj, poisson or powerlaw");
}

FitConfig fit_config_from(const FitFlags& ff) {
  FitConfig fc;
  fc.alpha = ff.alpha;
  fc.R = parse_range(ff.range);
  fc.grid = ff.grid;
  if (ff.contrast == "pl") fc.contrast = ContrastKind::PL;
  else if (ff.contrast == "lr") fc.contrast = ContrastKind::LR;
  else throw CLI::ValidationError("--contrast", "must be pl or lr");
  fc.rho = ff.rho == "auto" ? 0.0 : parse_double(ff.rho);
  if (ff.rescale_by == "auto") {
    fc.rescale = RescaleMode::Auto;
  } else if (ff.rescale_by == "none") {
    fc.rescale = RescaleMode::None;
  } else {
    fc.rescale = RescaleMode::Value;
    fc.rescale_value = parse_double(ff.rescale_by);
  }
  fc.tol_grad = ff.tol_grad;
  fc.max_iter = ff.max_iter;
  return fc;
}

ordered_json matrix_json(const std::vector<double>& m, int p) {
  ordered_json rows = ordered_json::array();
  for (int j = 0; j < p; ++j) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k < p; ++k) row.push_back(m[static_cast<std::size_t>(j * p + k)]);
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_simulate(const std::string& model_path, const std::string& window_str,
                 double margin, std::uint64_t steps, std::uint64_t seed, int reps,
                 const std::string& out_dir) {
  const ModelFile mf = read_model_json(model_path);
  const Window target = parse_window_commas(window_str);
  fs::create_directories(out_dir);
  MHConfig cfg;
  cfg.margin = margin;
  cfg.seed = seed;
  const double beta = std::exp(-mf.theta.v.at(0));
  cfg.n_steps = steps != 0 ? steps : default_mh_steps(beta, area(expand(target, margin)));
  if (mf.physical && mf.physical->sigma > 0.0) cfg.shift_scale = mf.physical->sigma;
  for (int rep = 0; rep < reps; ++rep) {
    const Configuration pat =
        mh_sample(mf.spec, mf.theta, target, cfg, static_cast<std::uint64_t>(rep));
    const fs::path out = fs::path(out_dir) / ("pat_" + std::to_string(rep) + ".json");
    write_pattern_json(pat, out.string());
  }
  return 0;
}

int run_fit(const FitFlags& ff) {
  const Configuration pattern = ff.pattern_path.ends_with(".csv")
                                    ? read_pattern_csv(ff.pattern_path)
                                    : read_pattern_json(ff.pattern_path);
  const ModelSpec m = model_for_family(ff);
  const FitConfig fc = fit_config_from(ff);
  const FitResult fr = fit(pattern, m, fc);

  ordered_json j;
  j["theta"] = fr.theta.v;
  if (fr.physical) {
    j["physical"] = {{"beta", fr.physical->beta},
                     {"sigma", fr.physical->sigma},
                     {"epsilon", fr.physical->epsilon}};
  } else {
    j["physical"] = nullptr;
  }
  j["converged"] = fr.converged;
  j["iterations"] = fr.iterations;
  j["grad_norm"] = fr.grad_norm;
  j["neg_contrast"] = fr.neg_contrast;
  j["nonfinite_energy"] = fr.nonfinite_energy;
  j["hessian_regularized"] = fr.hessian_regularized;
  j["scale"] = fr.scale;
  j["kernel"] = kernels::active_kernel_name(m);
  j["hessian"] = matrix_json(fr.hessian, m.p());
  j["fit_config"] = {{"alpha", fc.alpha},
                     {"R", format_double(fc.R)},
                     {"grid", fc.grid},
                     {"contrast", ff.contrast},
                     {"rho", ff.rho},
                     {"rescale_by", ff.rescale_by},
                     {"tol_grad", fc.tol_grad},
                     {"max_iter", fc.max_iter}};
  if (ff.cov) {
    const CovarianceReport rep = covariance_report(pattern, m, fr.theta, fc, ff.block_side);
    ordered_json cj;
    cj["valid"] = rep.valid;
    cj["reason"] = rep.reason;
    cj["blocks"] = rep.blocks;
    cj["lag"] = rep.lag;
    cj["psd_projected"] = rep.psd_projected;
    cj["U"] = matrix_json(rep.U, rep.p);
    if (!rep.Sigma.empty()) cj["Sigma"] = matrix_json(rep.Sigma, rep.p);
    if (!rep.sandwich.empty()) {
      cj["sandwich"] = matrix_json(rep.sandwich, rep.p);
      ordered_json se = ordered_json::array();
      for (int d = 0; d < rep.p; ++d)
        se.push_back(std::sqrt(rep.sandwich[static_cast<std::size_t>(d * rep.p + d)]));
      cj["se"] = se;
    }
    j["covariance"] = std::move(cj);
  }
  std::ofstream out(ff.out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + ff.out_path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + ff.out_path);
  return fr.converged ? 0 : 2;
}

int run_qq(const std::string& estimates_path, const std::string& regime,
           const std::string& window, const std::string& alpha, const std::string& range,
           const std::string& out_dir) {
  const std::vector<EstimateRow> rows = read_estimates_csv(estimates_path);
  std::vector<double> lb, sigma, eps;
  const bool filter_alpha = !alpha.empty();
  const double alpha_v = filter_alpha ? parse_double(alpha) : 0.0;
  const bool filter_r = !range.empty();
  const double r_v = filter_r ? parse_range(range) : 0.0;
  for (const EstimateRow& r : rows) {
    if (!r.ok) continue;
    if (!regime.empty() && r.regime != regime) continue;
    if (!window.empty() && r.window != window) continue;
    if (filter_alpha && r.alpha != alpha_v) continue;
    if (filter_r && r.R != r_v) continue;
    lb.push_back(r.logbeta);
    sigma.push_back(r.sigma);
    eps.push_back(r.eps);
  }
  if (lb.size() < 2) {
    std::cerr << "qq: fewer than 2 usable estimates after filtering\n";
    return 1;
  }
  if (lb.size() < 20)
    std::cerr << "qq: warning: only " << lb.size()
              << " estimates; at least 20 recommended for a meaningful diagnostic\n";
  fs::create_directories(out_dir);
  const std::pair<const char*, std::vector<double>*> params[] = {
      {"logbeta", &lb}, {"sigma", &sigma}, {"epsilon", &eps}};
  for (const auto& [name, vals] : params) {
    const QQData qq = qq_data(*vals);
    const fs::path out = fs::path(out_dir) / (std::string("qq_") + name + ".csv");
    write_qq_csv(qq, out.string());
    std::cout << name << " r_squared " << format_double(qq.r_squared) << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairwise-interaction Gibbs point processes: simulation, "
               "truncated pseudolikelihood and logistic estimation, block "
               "covariance and replication experiments"};
  app.require_subcommand(1);

  // simulate
  std::string sim_model, sim_window, sim_out = ".";
  double sim_margin = 2.0;
  std::uint64_t sim_steps = 0, sim_seed = 0;
  int sim_reps = 1;
  CLI::App* sim = app.add_subcommand("simulate", "Draw patterns from a model by birth-death-move MH");
  sim->add_option("--model", sim_model, "model JSON file")->required();
  sim->add_option("--window", sim_window, "target window x0,x1,y0,y1")->required();
  sim->add_option("--margin", sim_margin, "extension of the window per side");
  sim->add_option("--steps", sim_steps, "chain length (0 = auto)");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--reps", sim_reps, "number of patterns (streams 0..reps-1)");
  sim->add_option("--out", sim_out, "output directory (pat_<rep>.json)");

  // fit
  FitFlags ff;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a model to a point pattern");
  fit_cmd->add_option("--pattern", ff.pattern_path, "pattern JSON or CSV file")->required();
  fit_cmd->add_option("--model-family", ff.family, "lj | poisson | powerlaw");
  fit_cmd->add_option("--gammas", ff.gammas, "powerlaw exponents, largest first");
  fit_cmd->add_option("--alpha", ff.alpha, "erosion distance");
  fit_cmd->add_option("--range", ff.range, "truncation R (number or 'inf')");
  fit_cmd->add_option("--grid", ff.grid, "quadrature grid per axis");
  fit_cmd->add_option("--contrast", ff.contrast, "pl | lr");
  fit_cmd->add_option("--rho", ff.rho, "logistic reference rate (number or 'auto')");
  fit_cmd->add_option("--rescale-by", ff.rescale_by, "distance rescale: value | auto | none");
  fit_cmd->add_option("--tol-grad", ff.tol_grad, "score sup-norm tolerance");
  fit_cmd->add_option("--max-iter", ff.max_iter, "Newton iteration cap");
  fit_cmd->add_flag("--cov", ff.cov, "attach the block sandwich covariance");
  fit_cmd->add_option("--block-side", ff.block_side, "covariance block side (0 = auto)");
  fit_cmd->add_option("--out", ff.out_path, "result JSON path");

  // experiment
  std::string exp_spec, exp_out;
  int exp_jobs = 1;
  bool exp_keep = false;
  CLI::App* exp = app.add_subcommand("experiment", "Run a replication study from a spec");
  exp->add_option("--spec", exp_spec, "experiment spec JSON")->required();
  exp->add_option("--jobs", exp_jobs, "parallel replications");
  exp->add_flag("--keep-patterns", exp_keep, "write simulated patterns");
  exp->add_option("--out", exp_out, "output directory (overrides spec out_dir)");

  // qq
  std::string qq_est, qq_regime, qq_window, qq_alpha, qq_range, qq_out = ".";
  CLI::App* qq = app.add_subcommand("qq", "Normal QQ data from estimates.csv");
  qq->add_option("--estimates", qq_est, "estimates.csv from an experiment")->required();
  qq->add_option("--regime", qq_regime, "filter: regime name");
  qq->add_option("--window", qq_window, "filter: window x0:x1:y0:y1");
  qq->add_option("--alpha", qq_alpha, "filter: alpha");
  qq->add_option("--range", qq_range, "filter: R (number or 'inf')");
  qq->add_option("--out", qq_out, "output directory (qq_<param>.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return run_simulate(sim_model, sim_window, sim_margin, sim_steps, sim_seed,
                          sim_reps, sim_out);
    if (fit_cmd->parsed()) return run_fit(ff);
    if (exp->parsed()) {
      const ExperimentSpec spec = read_experiment_json(exp_spec);
      const MetricsReport report = run_experiment(spec, exp_jobs, exp_keep, exp_out);
      int failed = 0, total = 0;
      for (const auto& c : report.cells) {
        failed += c.metrics.reps_failed;
        total += c.metrics.reps_failed + c.metrics.reps_ok;
      }
      std::cout << "cells " << report.cells.size() << ", fits " << total
                << ", failed " << failed << "\n";
      return report.any_unreliable ? 2 : 0;
    }
    if (qq->parsed()) return run_qq(qq_est, qq_regime, qq_window, qq_alpha, qq_range, qq_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
