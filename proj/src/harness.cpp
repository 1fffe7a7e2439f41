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
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "gibbs/errors.hpp"
#include "gibbs/harness.hpp"
#include "gibbs/numeric.hpp"
#include "gibbs/parallel.hpp"
#include "gibbs/pattern_io.hpp"

namespace gibbs {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> effective_alphas(const RegimeSpec& r) {
  std::vector<double> out;
  if (r.include_zero_erosion &&
      std::find(r.alphas.begin(), r.alphas.end(), 0.0) == r.alphas.end())
    out.push_back(0.0);
  out.insert(out.end(), r.alphas.begin(), r.alphas.end());
  return out;
}

double mean_of(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

} // namespace

void ExperimentSpec::validate() const {
  if (!(truth.beta > 0.0) || !std::isfinite(truth.beta) || truth.beta == 1.0)
    throw std::invalid_argument(
        "ExperimentSpec: truth.beta must be positive, finite and != 1 "
        "(log beta enters the weighted errors as a denominator)");
  if (!(truth.sigma > 0.0) || !std::isfinite(truth.sigma))
    throw std::invalid_argument("ExperimentSpec: truth.sigma must be positive");
  if (!(truth.epsilon > 0.0) || !std::isfinite(truth.epsilon))
    throw std::invalid_argument("ExperimentSpec: truth.epsilon must be positive");
  if (windows.empty()) throw std::invalid_argument("ExperimentSpec: no windows");
  if (replications < 2) throw std::invalid_argument("ExperimentSpec: replications must be >= 2");
  if (regimes.empty()) throw std::invalid_argument("ExperimentSpec: no regimes");
  for (const RegimeSpec& r : regimes) {
    if (r.name.empty()) throw std::invalid_argument("ExperimentSpec: regime without a name");
    if (r.r_equal_alpha && r.include_zero_erosion)
      throw std::invalid_argument("ExperimentSpec: regime '" + r.name +
                                  "': R = alpha = 0 would truncate every neighborhood away");
    const std::vector<double> alphas = effective_alphas(r);
    if (alphas.empty())
      throw std::invalid_argument("ExperimentSpec: regime '" + r.name + "' has no alphas");
    for (double a : alphas) {
      if (!(a >= 0.0) || !std::isfinite(a))
        throw std::invalid_argument("ExperimentSpec: regime '" + r.name + "': bad alpha");
      if (r.r_equal_alpha && !(a > 0.0))
        throw std::invalid_argument("ExperimentSpec: regime '" + r.name +
                                    "': R = alpha needs alpha > 0");
      for (const Window& w : windows)
        if (!(w.width() > 2.0 * a) || !(w.height() > 2.0 * a))
          throw std::invalid_argument("ExperimentSpec: regime '" + r.name +
                                      "': alpha erodes a window to nothing");
    }
  }
  if (!(mh.p_shift >= 0.0) || !(mh.p_shift < 1.0))
    throw std::invalid_argument("ExperimentSpec: mh.p_shift must lie in [0, 1)");
  if (!(mh.margin >= 0.0) || !std::isfinite(mh.margin))
    throw std::invalid_argument("ExperimentSpec: mh.margin must be finite and nonnegative");
  if (fit.grid < 2) throw std::invalid_argument("ExperimentSpec: fit.grid must be >= 2");
  if (fit.rescale == RescaleBy::Value && !(fit.rescale_value > 0.0))
    throw std::invalid_argument("ExperimentSpec: fit.rescale_value must be positive");
  if (!(fit.tol_grad > 0.0)) throw std::invalid_argument("ExperimentSpec: fit.tol_grad must be positive");
  if (fit.max_iter < 1) throw std::invalid_argument("ExperimentSpec: fit.max_iter must be >= 1");
}

namespace {

ordered_json window_json(const Window& w) {
  return ordered_json::array({{w.lo.x, w.hi.x}, {w.lo.y, w.hi.y}});
}

Window json_window(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || j[0].size() != 2 || j[1].size() != 2)
    throw std::runtime_error(where + ": window must be [[x0,x1],[y0,y1]]");
  return Window{{j[0][0].get<double>(), j[1][0].get<double>()},
                {j[0][1].get<double>(), j[1][1].get<double>()}};
}

std::string contrast_name(ContrastKind c) { return c == ContrastKind::PL ? "pl" : "lr"; }

ContrastKind contrast_from(const std::string& s, const std::string& where) {
  if (s == "pl") return ContrastKind::PL;
  if (s == "lr") return ContrastKind::LR;
  throw std::runtime_error(where + ": contrast must be 'pl' or 'lr'");
}

std::string rescale_name(RescaleBy r) {
  switch (r) {
    case RescaleBy::TrueSigma: return "true_sigma";
    case RescaleBy::Auto: return "auto";
    case RescaleBy::None: return "none";
    case RescaleBy::Value:
    default: return "value";
  }
}

RescaleBy rescale_from(const std::string& s, const std::string& where) {
  if (s == "true_sigma") return RescaleBy::TrueSigma;
  if (s == "auto") return RescaleBy::Auto;
  if (s == "none") return RescaleBy::None;
  if (s == "value") return RescaleBy::Value;
  throw std::runtime_error(where + ": rescale_by must be true_sigma|auto|none|value");
}

} // namespace

ExperimentSpec read_experiment_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }

  ExperimentSpec spec;
  const ordered_json& t = j.at("truth");
  spec.truth.beta = t.at("beta").get<double>();
  spec.truth.sigma = t.at("sigma").get<double>();
  spec.truth.epsilon = t.at("epsilon").get<double>();
  for (const auto& w : j.at("windows")) spec.windows.push_back(json_window(w, path));
  for (const auto& r : j.at("regimes")) {
    RegimeSpec rs;
    rs.name = r.at("name").get<std::string>();
    for (const auto& a : r.at("alphas")) rs.alphas.push_back(a.get<double>());
    const std::string rule = r.value("r_rule", "inf");
    if (rule == "alpha") rs.r_equal_alpha = true;
    else if (rule != "inf") throw std::runtime_error(path + ": r_rule must be 'inf' or 'alpha'");
    rs.include_zero_erosion = r.value("include_zero_erosion", false);
    spec.regimes.push_back(std::move(rs));
  }
  spec.replications = j.value("replications", 2);
  spec.base_seed = j.value("base_seed", std::uint64_t{0});
  if (j.contains("mh")) {
    const ordered_json& m = j["mh"];
    spec.mh.steps = m.value("steps", std::uint64_t{0});
    spec.mh.p_shift = m.value("p_shift", 1.0 / 3.0);
    spec.mh.shift_scale = m.value("shift_scale", 0.0);
    spec.mh.margin = m.value("margin", 2.0);
  }
  if (j.contains("fit")) {
    const ordered_json& f = j["fit"];
    spec.fit.grid = f.value("grid", 100);
    spec.fit.contrast = contrast_from(f.value("contrast", "pl"), path);
    spec.fit.rho = f.value("rho", 0.0);
    spec.fit.rescale = rescale_from(f.value("rescale_by", "true_sigma"), path);
    spec.fit.rescale_value = f.value("rescale_value", 1.0);
    spec.fit.tol_grad = f.value("tol_grad", 1e-8);
    spec.fit.max_iter = f.value("max_iter", 100);
  }
  spec.out_dir = j.value("out_dir", "");
  spec.validate();
  return spec;
}

void write_experiment_json(const ExperimentSpec& spec, const std::string& path) {
  ordered_json j;
  j["truth"] = {{"beta", spec.truth.beta},
                {"sigma", spec.truth.sigma},
                {"epsilon", spec.truth.epsilon}};
  j["windows"] = ordered_json::array();
  for (const Window& w : spec.windows) j["windows"].push_back(window_json(w));
  j["regimes"] = ordered_json::array();
  for (const RegimeSpec& r : spec.regimes) {
    ordered_json rj;
    rj["name"] = r.name;
    rj["alphas"] = r.alphas;
    rj["r_rule"] = r.r_equal_alpha ? "alpha" : "inf";
    rj["include_zero_erosion"] = r.include_zero_erosion;
    j["regimes"].push_back(std::move(rj));
  }
  j["replications"] = spec.replications;
  j["base_seed"] = spec.base_seed;
  j["mh"] = {{"steps", spec.mh.steps},
             {"p_shift", spec.mh.p_shift},
             {"shift_scale", spec.mh.shift_scale},
             {"margin", spec.mh.margin}};
  j["fit"] = {{"grid", spec.fit.grid},
              {"contrast", contrast_name(spec.fit.contrast)},
              {"rho", spec.fit.rho},
              {"rescale_by", rescale_name(spec.fit.rescale)},
              {"rescale_value", spec.fit.rescale_value},
              {"tol_grad", spec.fit.tol_grad},
              {"max_iter", spec.fit.max_iter}};
  if (!spec.out_dir.empty()) j["out_dir"] = spec.out_dir;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

CellMetrics metrics(const std::vector<Estimate>& estimates, const LJParams& truth,
                    int reps_total) {
  CellMetrics cm;
  std::vector<double> e_lb, e_s, e_e;
  for (const Estimate& est : estimates) {
    if (!est.ok) continue;
    e_lb.push_back(est.logbeta - std::log(truth.beta));
    e_s.push_back(est.sigma - truth.sigma);
    e_e.push_back(est.eps - truth.epsilon);
  }
  const int m = static_cast<int>(e_lb.size());
  cm.reps_ok = m;
  cm.reps_failed = reps_total - m;
  cm.unreliable = 5 * cm.reps_failed > reps_total;
  if (m == 0) {
    cm.rwmse = cm.rwsb = cm.rwv = kNaN;
    cm.bias_logbeta = cm.bias_sigma = cm.bias_eps = kNaN;
    cm.sd_logbeta = cm.sd_sigma = cm.sd_eps = kNaN;
    return cm;
  }

  const double denom_lb = std::log(truth.beta) * std::log(truth.beta);
  const double denom_s = truth.sigma * truth.sigma;
  const double denom_e = truth.epsilon * truth.epsilon;

  auto sq = [](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
    return out;
  };
  auto centered_sq = [](const std::vector<double>& v, double c) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - c) * (v[i] - c);
    return out;
  };

  cm.bias_logbeta = mean_of(e_lb);
  cm.bias_sigma = mean_of(e_s);
  cm.bias_eps = mean_of(e_e);
  const double var_lb = mean_of(centered_sq(e_lb, cm.bias_logbeta));
  const double var_s = mean_of(centered_sq(e_s, cm.bias_sigma));
  const double var_e = mean_of(centered_sq(e_e, cm.bias_eps));
  cm.sd_logbeta = std::sqrt(var_lb);
  cm.sd_sigma = std::sqrt(var_s);
  cm.sd_eps = std::sqrt(var_e);

  // The root mean comes from the raw squared errors; the bias/variance split
  // below reproduces it through the population-variance identity.
  const double wmse = mean_of(sq(e_lb)) / denom_lb + mean_of(sq(e_s)) / denom_s +
                      mean_of(sq(e_e)) / denom_e;
  cm.rwmse = std::sqrt(wmse);
  cm.rwsb = std::sqrt(cm.bias_logbeta * cm.bias_logbeta / denom_lb +
                      cm.bias_sigma * cm.bias_sigma / denom_s +
                      cm.bias_eps * cm.bias_eps / denom_e);
  cm.rwv = std::sqrt(var_lb / denom_lb + var_s / denom_s + var_e / denom_e);
  return cm;
}

namespace {

struct CellPlan {
  CellKey key;
  FitConfig fc;
  std::size_t window_idx = 0;
};

void write_report_csv(const MetricsReport& report, const ExperimentSpec& spec,
                      const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "regime,window,alpha,R,reps_ok,reps_failed,rwmse,rwsb,rwv,"
         "bias_logbeta,bias_sigma,bias_eps,sd_logbeta,sd_sigma,sd_eps\n";
  for (const Cell& c : report.cells) {
    const CellMetrics& m = c.metrics;
    out << c.key.regime << ','
        << format_window(spec.windows[static_cast<std::size_t>(c.key.window_idx)]) << ','
        << format_double(c.key.alpha) << ',' << format_double(c.key.R) << ','
        << m.reps_ok << ',' << m.reps_failed << ',' << format_double(m.rwmse) << ','
        << format_double(m.rwsb) << ',' << format_double(m.rwv) << ','
        << format_double(m.bias_logbeta) << ',' << format_double(m.bias_sigma) << ','
        << format_double(m.bias_eps) << ',' << format_double(m.sd_logbeta) << ','
        << format_double(m.sd_sigma) << ',' << format_double(m.sd_eps) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_estimates_csv(const MetricsReport& report, const ExperimentSpec& spec,
                         const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "regime,window,alpha,R,rep,converged,ok,logbeta,sigma,epsilon,"
         "theta1,theta2,theta3\n";
  for (const Cell& c : report.cells) {
    const std::string win =
        format_window(spec.windows[static_cast<std::size_t>(c.key.window_idx)]);
    for (const Estimate& e : c.estimates) {
      out << c.key.regime << ',' << win << ',' << format_double(c.key.alpha) << ','
          << format_double(c.key.R) << ',' << e.rep << ',' << (e.converged ? 1 : 0) << ','
          << (e.ok ? 1 : 0) << ',' << format_double(e.logbeta) << ','
          << format_double(e.sigma) << ',' << format_double(e.eps);
      for (int j = 0; j < 3; ++j)
        out << ',' << format_double(j < static_cast<int>(e.theta.size())
                                        ? e.theta[static_cast<std::size_t>(j)]
                                        : kNaN);
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_report_json(const MetricsReport& report, const ExperimentSpec& spec,
                       const std::string& path) {
  ordered_json j;
  j["truth"] = {{"beta", spec.truth.beta},
                {"sigma", spec.truth.sigma},
                {"epsilon", spec.truth.epsilon}};
  j["replications"] = spec.replications;
  j["any_unreliable"] = report.any_unreliable;
  j["cells"] = ordered_json::array();
  for (const Cell& c : report.cells) {
    const CellMetrics& m = c.metrics;
    ordered_json cj;
    cj["regime"] = c.key.regime;
    cj["window"] = format_window(spec.windows[static_cast<std::size_t>(c.key.window_idx)]);
    cj["alpha"] = c.key.alpha;
    cj["R"] = format_double(c.key.R); // string: JSON numbers cannot carry inf
    cj["reps_ok"] = m.reps_ok;
    cj["reps_failed"] = m.reps_failed;
    cj["unreliable"] = m.unreliable;
    cj["rwmse"] = format_double(m.rwmse);
    cj["rwsb"] = format_double(m.rwsb);
    cj["rwv"] = format_double(m.rwv);
    cj["bias"] = {format_double(m.bias_logbeta), format_double(m.bias_sigma),
                  format_double(m.bias_eps)};
    cj["sd"] = {format_double(m.sd_logbeta), format_double(m.sd_sigma),
                format_double(m.sd_eps)};
    j["cells"].push_back(std::move(cj));
  }
  j["alpha_opt"] = ordered_json::array();
  for (const AlphaOpt& a : report.alpha_opt) {
    j["alpha_opt"].push_back({{"regime", a.regime},
                              {"window_idx", a.window_idx},
                              {"alpha_opt", a.alpha_opt},
                              {"smallest_alpha_attains_min", a.smallest_alpha_attains_min}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace

MetricsReport run_experiment(const ExperimentSpec& spec, int jobs, bool keep_patterns,
                             const std::string& out_dir) {
  spec.validate();
  const std::string out = !out_dir.empty() ? out_dir
                          : !spec.out_dir.empty() ? spec.out_dir
                                                  : std::string(".");
  fs::create_directories(out);

  const ThetaNatural theta_star = lj_to_natural(spec.truth);
  const ModelSpec model = ModelSpec::lennard_jones(spec.truth.sigma);
  const std::size_t n_windows = spec.windows.size();
  const std::size_t reps = static_cast<std::size_t>(spec.replications);

  std::vector<MHConfig> mh_cfg(n_windows);
  for (std::size_t iw = 0; iw < n_windows; ++iw) {
    MHConfig& c = mh_cfg[iw];
    c.p_shift = spec.mh.p_shift;
    c.shift_scale = spec.mh.shift_scale > 0.0 ? spec.mh.shift_scale : spec.truth.sigma;
    c.margin = spec.mh.margin;
    c.seed = spec.base_seed;
    c.n_steps = spec.mh.steps != 0
                    ? spec.mh.steps
                    : default_mh_steps(spec.truth.beta,
                                       area(expand(spec.windows[iw], spec.mh.margin)));
  }

  std::vector<CellPlan> plan;
  for (const RegimeSpec& r : spec.regimes) {
    const std::vector<double> alphas = effective_alphas(r);
    for (std::size_t iw = 0; iw < n_windows; ++iw) {
      for (double a : alphas) {
        CellPlan cp;
        cp.key = CellKey{r.name, static_cast<int>(iw), a, r.r_equal_alpha ? a : kInf};
        cp.window_idx = iw;
        cp.fc.alpha = a;
        cp.fc.R = cp.key.R;
        cp.fc.grid = spec.fit.grid;
        cp.fc.contrast = spec.fit.contrast;
        cp.fc.rho = spec.fit.rho;
        switch (spec.fit.rescale) {
          case RescaleBy::TrueSigma:
            cp.fc.rescale = RescaleMode::Value;
            cp.fc.rescale_value = spec.truth.sigma;
            break;
          case RescaleBy::Auto:
            cp.fc.rescale = RescaleMode::Auto;
            break;
          case RescaleBy::None:
            cp.fc.rescale = RescaleMode::None;
            break;
          case RescaleBy::Value:
            cp.fc.rescale = RescaleMode::Value;
            cp.fc.rescale_value = spec.fit.rescale_value;
            break;
        }
        cp.fc.tol_grad = spec.fit.tol_grad;
        cp.fc.max_iter = spec.fit.max_iter;
        plan.push_back(std::move(cp));
      }
    }
  }

  if (keep_patterns)
    for (std::size_t iw = 0; iw < n_windows; ++iw)
      fs::create_directories(fs::path(out) / "patterns" / ("w" + std::to_string(iw)));

  std::vector<std::vector<Estimate>> slots(plan.size(), std::vector<Estimate>(reps));

  parallel_for(reps, jobs, [&](std::size_t rep) {
    std::vector<Configuration> patterns;
    patterns.reserve(n_windows);
    for (std::size_t iw = 0; iw < n_windows; ++iw) {
      const std::uint64_t stream =
          (static_cast<std::uint64_t>(iw) << 32) | static_cast<std::uint32_t>(rep);
      patterns.push_back(mh_sample(model, theta_star, spec.windows[iw], mh_cfg[iw], stream));
      if (keep_patterns) {
        const fs::path p = fs::path(out) / "patterns" / ("w" + std::to_string(iw)) /
                           ("pat_" + std::to_string(rep) + ".json");
        write_pattern_json(patterns.back(), p.string());
      }
    }
    for (std::size_t ci = 0; ci < plan.size(); ++ci) {
      Estimate est;
      est.rep = static_cast<int>(rep);
      est.logbeta = est.sigma = est.eps = kNaN;
      try {
        const FitResult fr = fit(patterns[plan[ci].window_idx], model, plan[ci].fc);
        est.converged = fr.converged;
        est.theta = fr.theta.v;
        est.logbeta = -fr.theta.v[0];
        if (fr.physical) {
          est.sigma = fr.physical->sigma;
          est.eps = fr.physical->epsilon;
        }
        est.ok = fr.converged && fr.physical.has_value();
      } catch (const std::exception&) {
        est.ok = false;
      }
      slots[ci][rep] = std::move(est);
    }
  });

  MetricsReport report;
  report.cells.reserve(plan.size());
  for (std::size_t ci = 0; ci < plan.size(); ++ci) {
    Cell c;
    c.key = plan[ci].key;
    c.estimates = std::move(slots[ci]);
    c.metrics = metrics(c.estimates, spec.truth, spec.replications);
    report.any_unreliable = report.any_unreliable || c.metrics.unreliable;
    report.cells.push_back(std::move(c));
  }

  for (const RegimeSpec& r : spec.regimes) {
    if (effective_alphas(r).size() < 2) continue;
    for (std::size_t iw = 0; iw < n_windows; ++iw) {
      const AlphaSweep sweep = alpha_sweep(report, r.name, static_cast<int>(iw));
      AlphaOpt opt;
      opt.regime = r.name;
      opt.window_idx = static_cast<int>(iw);
      opt.alpha_opt = sweep.alpha_opt;
      opt.smallest_alpha_attains_min =
          sweep.alpha_opt == *std::min_element(sweep.alphas.begin(), sweep.alphas.end());
      report.alpha_opt.push_back(std::move(opt));
    }
  }

  write_report_csv(report, spec, (fs::path(out) / "report.csv").string());
  write_estimates_csv(report, spec, (fs::path(out) / "estimates.csv").string());
  write_report_json(report, spec, (fs::path(out) / "report.json").string());
  return report;
}

AlphaSweep alpha_sweep(const MetricsReport& report, const std::string& regime,
                       int window_idx) {
  AlphaSweep sweep;
  for (const Cell& c : report.cells) {
    if (c.key.regime != regime || c.key.window_idx != window_idx) continue;
    sweep.alphas.push_back(c.key.alpha);
    sweep.rwmse.push_back(c.metrics.rwmse);
  }
  if (sweep.alphas.empty())
    throw std::invalid_argument("alpha_sweep: no cells for regime '" + regime + "'");
  double best = kInf;
  sweep.alpha_opt = kNaN;
  for (std::size_t i = 0; i < sweep.alphas.size(); ++i) {
    const double r = sweep.rwmse[i];
    if (!std::isfinite(r)) continue;
    if (r < best || (r == best && sweep.alphas[i] < sweep.alpha_opt)) {
      best = r;
      sweep.alpha_opt = sweep.alphas[i];
    }
  }
  return sweep;
}

QQData qq_data(const std::vector<double>& estimates) {
  const std::size_t m = estimates.size();
  if (m < 2) throw std::invalid_argument("qq_data: need at least 2 estimates");
  const double mean = mean_of(estimates);
  std::vector<double> dev2(m);
  for (std::size_t i = 0; i < m; ++i)
    dev2[i] = (estimates[i] - mean) * (estimates[i] - mean);
  const double sd = std::sqrt(mean_of(dev2));
  if (!(sd > 0.0)) throw DegenerateSD("qq_data: sample standard deviation is zero");

  QQData qq;
  qq.standardized.resize(m);
  for (std::size_t i = 0; i < m; ++i) qq.standardized[i] = (estimates[i] - mean) / sd;
  std::sort(qq.standardized.begin(), qq.standardized.end());
  qq.quantile.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    qq.quantile[i] = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(m));

  const double qbar = mean_of(qq.quantile);
  const double zbar = mean_of(qq.standardized);
  double sqq = 0.0, szz = 0.0, sqz = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dq = qq.quantile[i] - qbar;
    const double dz = qq.standardized[i] - zbar;
    sqq += dq * dq;
    szz += dz * dz;
    sqz += dq * dz;
  }
  qq.r_squared = (sqz * sqz) / (sqq * szz);
  return qq;
}

void write_qq_csv(const QQData& qq, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "normal_quantile,standardized_estimate\n";
  for (std::size_t i = 0; i < qq.quantile.size(); ++i)
    out << format_double(qq.quantile[i]) << ',' << format_double(qq.standardized[i]) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string format_window(const Window& w) {
  return format_double(w.lo.x) + ":" + format_double(w.hi.x) + ":" +
         format_double(w.lo.y) + ":" + format_double(w.hi.y);
}

Window parse_window(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4)
    throw std::invalid_argument("parse_window: expected x0:x1:y0:y1, got '" + s + "'");
  return Window{{parse_double(parts[0]), parse_double(parts[2])},
                {parse_double(parts[1]), parse_double(parts[3])}};
}

std::vector<EstimateRow> read_estimates_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw std::runtime_error(path + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_regime = col("regime"), c_window = col("window"),
                    c_alpha = col("alpha"), c_r = col("R"), c_rep = col("rep"),
                    c_conv = col("converged"), c_ok = col("ok"),
                    c_lb = col("logbeta"), c_sigma = col("sigma"), c_eps = col("epsilon");

  std::vector<EstimateRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < header.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": short row");
    EstimateRow r;
    r.regime = fields[c_regime];
    r.window = fields[c_window];
    r.alpha = parse_double(fields[c_alpha]);
    r.R = parse_double(fields[c_r]);
    r.rep = static_cast<int>(std::stol(fields[c_rep]));
    r.converged = fields[c_conv] == "1";
    r.ok = fields[c_ok] == "1";
    r.logbeta = parse_double(fields[c_lb]);
    r.sigma = parse_double(fields[c_sigma]);
    r.eps = parse_double(fields[c_eps]);
    rows.push_back(std::move(r));
  }
  return rows;
}

} // namespace gibbs
