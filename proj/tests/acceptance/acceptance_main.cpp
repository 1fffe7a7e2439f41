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

/*
 * End-to-end acceptance gate. Each criterion prints one line
 *   [PASS|FAIL] criterion N: <what was checked> (<measurements>; <elapsed>)
 * and the process exits 0 only when every selected criterion passed.
 * Criteria 6 and 7 (and the normality diagnostic) share one replication
 * study, so selecting either runs the combined handler.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>

#include "gibbs/estimate.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/harness.hpp"
#include "gibbs/inference.hpp"
#include "gibbs/model.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/simulate.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gibbs;
using Clock = std::chrono::steady_clock;

const double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class Reporter {
 public:
  // num <= 0 marks an unnumbered diagnostic line.
  void line(int num, const std::string& label, bool pass, const std::string& detail,
            double secs) {
    std::printf("[%s] %s: %s (%s%.1f s)\n", pass ? "PASS" : "FAIL",
                num > 0 ? ("criterion " + std::to_string(num)).c_str() : "diagnostic",
                label.c_str(), detail.empty() ? "" : (detail + "; ").c_str(), secs);
    std::fflush(stdout);
    all_pass_ = all_pass_ && pass;
  }
  bool all_pass() const { return all_pass_; }

 private:
  bool all_pass_ = true;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Configuration binomial_pattern(std::uint64_t seed, int n, const Window& w) {
  RandomStream rng(seed, 0);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back({rng.uniform(w.lo.x, w.hi.x), rng.uniform(w.lo.y, w.hi.y)});
  }
  return Configuration(pts, w);
}

// Sequential inhibition: uniform candidates kept only at distance >= dmin
// from every accepted point. Bounded pair energies keep every conditional
// intensity strictly positive, which differencing the contrast needs.
Configuration inhibition_pattern(std::uint64_t seed, int n_target, double dmin,
                                 const Window& w) {
  RandomStream rng(seed, 2);
  std::vector<Vec2> pts;
  const double d2 = dmin * dmin;
  int attempts = 0;
  while (static_cast<int>(pts.size()) < n_target && attempts < 200000) {
    ++attempts;
    const Vec2 u{rng.uniform(w.lo.x, w.hi.x), rng.uniform(w.lo.y, w.hi.y)};
    bool ok = true;
    for (const Vec2& v : pts) {
      if (norm2(v - u) < d2) {
        ok = false;
        break;
      }
    }
    if (ok) pts.push_back(u);
  }
  return Configuration(pts, w);
}

// Fourth-order central difference of f at x with step h.
template <typename F>
double fd5(F f, double x, double h) {
  return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / (tag + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Working-units image of a natural parameter vector at conditioning scale s
// for a scale-free basis with exponents gamma (intercept shifts by -d log s).
std::vector<double> working_image(const ThetaNatural& theta, const ModelSpec& m, double s) {
  std::vector<double> out(theta.v.size());
  out[0] = theta.v[0] - 2.0 * std::log(s);
  for (std::size_t k = 1; k < theta.v.size(); ++k) {
    out[k] = theta.v[k] * std::pow(s, -m.basis[k - 1].gamma);
  }
  return out;
}

void criterion1(Reporter& rep) {
  const auto t0 = Clock::now();
  const Window w({0.0, 0.0}, {2.0, 1.5});
  const Configuration cfg = binomial_pattern(101, 137, w);
  const ModelSpec poisson = ModelSpec::poisson();
  double worst = 0.0;
  bool ok = true;
  for (double alpha : {0.0, 0.25}) {
    FitConfig fc;
    fc.alpha = alpha;
    fc.grid = 100;
    const FitResult fr = fit(cfg, poisson, fc);
    ok = ok && fr.converged;
    const Window er = erode(w, alpha);
    std::size_t n_in = 0;
    for (const Vec2& u : cfg.points()) {
      if (er.contains(u)) ++n_in;
    }
    const double target = static_cast<double>(n_in) / area(er);
    const double got = std::exp(-fr.theta.v[0]);
    worst = std::max(worst, std::abs(got - target) / target);
  }
  const double el = seconds_since(t0);
  ok = ok && worst <= 1e-9 && el < 1.0;
  rep.line(1, "poisson fit equals the count over the eroded area", ok,
           "max rel err " + fmt("%.2e", worst), el);
}

void criterion2(Reporter& rep) {
  const auto t0 = Clock::now();
  RandomStream rng(201, 0);
  const Window w({-3.0, -3.0}, {3.0, 3.0});
  const ModelSpec lj = ModelSpec::lennard_jones();
  double worst_score = 0.0, worst_hess = 0.0, worst_eig = 0.0;
  bool ok = true;
  for (int inst = 0; inst < 50; ++inst) {
    const int n = 50 + static_cast<int>(rng.uniform(0.0, 150.0));
    const Configuration cfg =
        inhibition_pattern(2100 + static_cast<std::uint64_t>(inst), n, 0.3, w);
    ok = ok && cfg.size() >= 50;
    const double sigma = rng.uniform(0.15, 0.35);
    const ThetaNatural theta =
        lj_to_natural({std::exp(rng.uniform(-1.0, 1.0)), sigma, rng.uniform(0.1, 1.0)});

    // Differencing needs the parameters on a common scale, so the design is
    // built in units of sigma.
    FitConfig fc;
    fc.alpha = (inst % 2 == 0) ? 0.0 : 0.4;
    fc.grid = 40;
    fc.R = (inst % 3 == 0) ? 2.5 : kInf;
    fc.rescale = RescaleMode::Value;
    fc.rescale_value = sigma;
    const Design d = build_design(cfg, lj, fc);
    const std::vector<double> tw = theta_to_working(d, theta);

    const std::vector<double> s = eval_score(d, tw);
    double smax = 1.0;
    for (double v : s) smax = std::max(smax, std::abs(v));
    for (std::size_t m = 0; m < 3; ++m) {
      const double h = 1e-4 * std::max(1.0, std::abs(tw[m]));
      const double fd = fd5(
          [&](double x) {
            std::vector<double> t = tw;
            t[m] = x;
            return eval_lpl(d, t);
          },
          tw[m], h);
      const double rel = std::abs(fd - s[m]) / std::max(std::abs(s[m]), 1e-7 * smax);
      worst_score = std::max(worst_score, rel);
    }

    const std::vector<double> hess = eval_hessian(d, tw);
    for (std::size_t m = 0; m < 3; ++m) {
      const double h = 1e-5 * std::max(1.0, std::abs(tw[m]));
      std::vector<double> tp = tw, tm = tw;
      tp[m] += h;
      tm[m] -= h;
      const std::vector<double> sp = eval_score(d, tp);
      const std::vector<double> sm = eval_score(d, tm);
      for (std::size_t k = 0; k < 3; ++k) {
        const double fd = -(sp[k] - sm[k]) / (2.0 * h);
        const double ex = hess[k * 3 + m];
        const double rel =
            std::abs(fd - ex) / std::max({std::abs(ex), std::abs(fd), 1e-7 * smax});
        worst_hess = std::max(worst_hess, rel);
      }
    }

    Eigen::Map<const Eigen::Matrix3d> hm(hess.data());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(hm);
    ok = ok && eig.info() == Eigen::Success;
    const double floor = -eig.eigenvalues().minCoeff() / std::max(hm.trace(), 1.0);
    worst_eig = std::max(worst_eig, floor);
  }
  const double el = seconds_since(t0);
  ok = ok && worst_score <= 1e-5 && worst_hess <= 1e-4 && worst_eig <= 1e-10 && el < 120.0;
  rep.line(2, "score and hessian match finite differences on 50 random instances", ok,
           "max score rel " + fmt("%.2e", worst_score) + ", max hessian rel " +
               fmt("%.2e", worst_hess),
           el);
}

void criterion3(Reporter& rep) {
  const auto t0 = Clock::now();
  const int reps = 200;
  bool ok = true;
  std::string detail;

  {
    const Window w({0.0, 0.0}, {1.0, 1.0});
    const ModelSpec poisson = ModelSpec::poisson();
    const ThetaNatural theta{{-std::log(100.0)}};
    FitConfig fc;
    fc.grid = 100;
    std::vector<double> vals;
    for (int r = 0; r < reps; ++r) {
      MHConfig mc;
      mc.margin = 0.0;
      mc.n_steps = 100000;
      mc.seed = 301;
      const Configuration cfg = mh_sample(poisson, theta, w, mc,
                                          static_cast<std::uint64_t>(r));
      vals.push_back(gnz_residual(cfg, poisson, theta, fc, GNZStatistic::Unit)[0] /
                     area(w));
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= reps;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (reps - 1)) / std::sqrt(double(reps));
    ok = ok && std::abs(mean) <= 3.0 * se;
    detail += "poisson |mean|/se " + fmt("%.2f", std::abs(mean) / se);
  }

  {
    const Window w({-1.0, -1.0}, {1.0, 1.0});
    const ModelSpec lj = ModelSpec::lennard_jones();
    const ThetaNatural theta = lj_to_natural({100.0, 0.1, 0.5});
    FitConfig fc;
    fc.alpha = 0.4;
    fc.grid = 100;
    fc.rescale = RescaleMode::Value;
    fc.rescale_value = 0.1;
    const double a = area(erode(w, fc.alpha));
    std::vector<std::vector<double>> comp(3);
    for (int r = 0; r < reps; ++r) {
      MHConfig mc;
      mc.margin = 1.0;
      mc.shift_scale = 0.1;
      mc.seed = 302;
      mc.n_steps = default_mh_steps(100.0, area(expand(w, mc.margin)));
      const Configuration cfg = mh_sample(lj, theta, w, mc, static_cast<std::uint64_t>(r));
      const std::vector<double> res = gnz_residual(cfg, lj, theta, fc, GNZStatistic::Stats);
      for (std::size_t k = 0; k < 3; ++k) comp[k].push_back(res[k] / a);
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      double mean = 0.0;
      for (double v : comp[k]) mean += v;
      mean /= reps;
      double var = 0.0;
      for (double v : comp[k]) var += (v - mean) * (v - mean);
      const double se = std::sqrt(var / (reps - 1)) / std::sqrt(double(reps));
      worst = std::max(worst, std::abs(mean) / se);
    }
    ok = ok && worst <= 3.0;
    detail += ", lj max |mean|/se " + fmt("%.2f", worst);
  }

  const double el = seconds_since(t0);
  ok = ok && el < 600.0;
  rep.line(3, "mean GNZ residuals vanish over 200 simulated patterns", ok, detail, el);
}

void criterion4(Reporter& rep) {
  const auto t0 = Clock::now();
  const Window w({-2.0, -2.0}, {2.0, 2.0});
  const ModelSpec lj = ModelSpec::lennard_jones();
  const ThetaNatural theta = lj_to_natural({100.0, 0.1, 0.5});
  MHConfig mc;
  mc.margin = 1.0;
  mc.shift_scale = 0.1;
  mc.seed = 401;
  mc.n_steps = default_mh_steps(100.0, area(expand(w, mc.margin)));
  const Configuration cfg = mh_sample(lj, theta, w, mc, 0);

  FitConfig fc;
  fc.alpha = 0.3;
  fc.grid = 100;
  const double full = lpl(cfg, lj, theta, fc);
  // The last radius exceeds the window diameter, so its neighbor sets equal
  // the untruncated ones and the gap must be exactly zero.
  const double radii[] = {0.3, 0.6, 1.2, 2.4, 8.0};
  std::vector<double> gaps;
  for (double R : radii) {
    FitConfig fr = fc;
    fr.R = R;
    gaps.push_back(std::abs(lpl(cfg, lj, theta, fr) - full));
  }
  bool ok = gaps.back() == 0.0;
  for (std::size_t i = 1; i < gaps.size(); ++i) ok = ok && gaps[i] <= gaps[i - 1];
  std::string detail = "gaps";
  for (double g : gaps) detail += " " + fmt("%.3g", g);
  const double el = seconds_since(t0);
  ok = ok && el < 60.0;
  rep.line(4, "truncation gap of the contrast decays to exactly zero", ok, detail, el);
}

void criterion5(Reporter& rep) {
  const auto t0 = Clock::now();
  const Window w({-1.0, -1.0}, {1.0, 1.0});
  const ModelSpec lj = ModelSpec::lennard_jones();
  const ThetaNatural truth = lj_to_natural({100.0, 0.1, 0.5});
  // tol_grad below the floating-point floor of the gradient norm forces
  // every start to iterate until no further progress is possible, instead of
  // stopping anywhere inside a looser gradient ball. Coincidence of the
  // resulting iterates is the acceptance contract; the explicit norm bound
  // below replaces the converged flag, which such a tolerance cannot set.
  FitConfig fc;
  fc.alpha = 0.2;
  fc.grid = 40;
  fc.rescale = RescaleMode::Value;
  fc.rescale_value = 0.1;
  fc.tol_grad = 5e-12;
  fc.max_iter = 100;

  bool ok = true;
  double worst = 0.0;
  for (int pat = 0; pat < 20; ++pat) {
    MHConfig mc;
    mc.margin = 0.5;
    mc.shift_scale = 0.1;
    mc.seed = 501;
    mc.n_steps = 50000;
    const Configuration cfg = mh_sample(lj, truth, w, mc, static_cast<std::uint64_t>(pat));

    RandomStream rng(502, static_cast<std::uint64_t>(pat));
    std::vector<std::vector<double>> fits;
    for (int s = 0; s < 5; ++s) {
      // Starts spread over a decade in beta and epsilon; sigma stays within
      // +-15% because inflating it much further underflows every quadrature
      // intensity and degenerates the very first Hessian.
      const ThetaNatural init = lj_to_natural({std::exp(rng.uniform(4.0, 5.2)),
                                               0.1 * std::exp(rng.uniform(-0.15, 0.15)),
                                               std::exp(rng.uniform(-1.0, 0.3))});
      const FitResult fr = fit(cfg, lj, fc, &init);
      ok = ok && std::isfinite(fr.grad_norm) && fr.grad_norm <= 1e-6;
      // Coincidence is measured in working units, where all components have
      // comparable magnitude; natural units would let the r^-12 coefficient
      // (~1e-12) dominate any relative comparison floor.
      fits.push_back(working_image(fr.theta, lj, fc.rescale_value));
    }
    double wmax = 1e-30;
    for (const auto& f : fits)
      for (double v : f) wmax = std::max(wmax, std::abs(v));
    for (std::size_t s = 1; s < fits.size(); ++s) {
      for (std::size_t k = 0; k < 3; ++k) {
        const double a = fits[0][k], b = fits[s][k];
        worst = std::max(worst,
                         std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-9 * wmax}));
      }
    }
  }
  const double el = seconds_since(t0);
  ok = ok && worst <= 1e-8 && el < 300.0;
  rep.line(5, "fits from 5 random starts coincide on each of 20 patterns", ok,
           "max rel spread " + fmt("%.2e", worst), el);
}

const Cell* find_cell(const MetricsReport& report, int window_idx) {
  for (const Cell& c : report.cells) {
    if (c.key.window_idx == window_idx) return &c;
  }
  return nullptr;
}

void criterion6_7(Reporter& rep) {
  const auto t0 = Clock::now();
  ExperimentSpec spec;
  spec.truth = {100.0, 0.1, 0.5};
  spec.windows = {Window({-0.5, -0.5}, {0.5, 0.5}), Window({-1.0, -1.0}, {1.0, 1.0}),
                  Window({-2.0, -2.0}, {2.0, 2.0})};
  RegimeSpec reg;
  reg.name = "rinf";
  reg.alphas = {0.0};
  spec.regimes = {reg};
  spec.replications = 100;
  spec.base_seed = 6001;
  spec.mh.margin = 2.0;
  spec.fit.grid = 100;
  spec.fit.rescale = RescaleBy::TrueSigma;
  spec.validate();

  const fs::path dir = fresh_dir("gibbs_acc_c6");
  const MetricsReport report = run_experiment(spec, 8, false, dir.string());
  const double el = seconds_since(t0);

  const Cell* c0 = find_cell(report, 0);
  const Cell* c1 = find_cell(report, 1);
  const Cell* c2 = find_cell(report, 2);
  const bool have = c0 && c1 && c2;

  {
    const double rw = have ? c1->metrics.rwmse : std::numeric_limits<double>::quiet_NaN();
    const bool ok = have && rw >= 0.20 && rw <= 0.50 && el < 2700.0;
    rep.line(6, "middle-window rwmse lies in [0.20, 0.50] over 100 replications", ok,
             "rwmse " + fmt("%.3f", rw) + ", fits ok " +
                 std::to_string(have ? c1->metrics.reps_ok : 0) + "/100",
             el);
  }
  {
    const bool ok = have && std::isfinite(c0->metrics.rwmse) &&
                    std::isfinite(c1->metrics.rwmse) && std::isfinite(c2->metrics.rwmse) &&
                    c0->metrics.rwmse > c1->metrics.rwmse &&
                    c1->metrics.rwmse > c2->metrics.rwmse;
    std::string detail = "rwmse";
    if (have) {
      detail += " " + fmt("%.3f", c0->metrics.rwmse) + " > " +
                fmt("%.3f", c1->metrics.rwmse) + " > " + fmt("%.3f", c2->metrics.rwmse);
    }
    rep.line(7, "rwmse decreases strictly as the window grows", ok, detail, el);
  }
  {
    bool ok = false;
    double r2 = std::numeric_limits<double>::quiet_NaN();
    if (have) {
      std::vector<double> eps;
      for (const Estimate& e : c2->estimates) {
        if (e.ok) eps.push_back(e.eps);
      }
      if (eps.size() >= 20) {
        r2 = qq_data(eps).r_squared;
        ok = r2 >= 0.90;
      }
    }
    rep.line(0, "epsilon estimates at the largest window are near normal", ok,
             "qq r^2 " + fmt("%.3f", r2), el);
  }
  fs::remove_all(dir);
}

void criterion8(Reporter& rep) {
  const auto t0 = Clock::now();
  ExperimentSpec spec;
  spec.truth = {100.0, 0.1, 0.5};
  spec.windows = {Window({-1.0, -1.0}, {1.0, 1.0})};
  RegimeSpec rinf;
  rinf.name = "rinf";
  rinf.alphas = {0.05, 0.15};
  RegimeSpec req;
  req.name = "req";
  req.alphas = {0.1, 0.2};
  req.r_equal_alpha = true;
  spec.regimes = {rinf, req};
  spec.replications = 10;
  spec.base_seed = 8001;
  spec.mh.margin = 1.0;
  spec.mh.steps = 60000;
  spec.fit.grid = 60;
  spec.validate();

  const fs::path dir = fresh_dir("gibbs_acc_c8");
  const MetricsReport report = run_experiment(spec, 1, false, dir.string());
  fs::remove_all(dir);

  bool ok = !report.cells.empty();
  double worst = 0.0;
  int populated = 0;
  for (const Cell& c : report.cells) {
    if (c.metrics.reps_ok == 0) continue;
    ++populated;
    const double lhs = c.metrics.rwmse * c.metrics.rwmse;
    const double rhs = c.metrics.rwsb * c.metrics.rwsb + c.metrics.rwv * c.metrics.rwv;
    const double err = std::abs(lhs - rhs) / std::max(1.0, lhs);
    worst = std::max(worst, err);
    ok = ok && err <= 1e-9;
  }
  ok = ok && populated >= 3;
  const double el = seconds_since(t0);
  rep.line(8, "rwmse^2 equals rwsb^2 + rwv^2 on every report cell", ok,
           std::to_string(populated) + " cells, max defect " + fmt("%.2e", worst), el);
}

void criterion9(Reporter& rep) {
  const auto t0 = Clock::now();
  const Window w({-2.0, -2.0}, {2.0, 2.0});
  const ModelSpec poisson = ModelSpec::poisson();
  const ThetaNatural theta{{-std::log(100.0)}};
  const double predicted = 1.0 / std::sqrt(100.0 * area(w));

  FitConfig fc;
  fc.grid = 50;
  std::vector<double> logbetas, ses;
  bool ok = true;
  for (int r = 0; r < 200; ++r) {
    MHConfig mc;
    mc.margin = 0.0;
    mc.n_steps = 100000;
    mc.seed = 901;
    const Configuration cfg = mh_sample(poisson, theta, w, mc, static_cast<std::uint64_t>(r));
    const FitResult fr = fit(cfg, poisson, fc);
    ok = ok && fr.converged;
    logbetas.push_back(-fr.theta.v[0]);
    const CovarianceReport cov = covariance_report(cfg, poisson, fr.theta, fc, 0.5);
    ok = ok && cov.valid;
    if (cov.valid) ses.push_back(std::sqrt(cov.sandwich[0]));
  }
  double mean = 0.0;
  for (double v : logbetas) mean += v;
  mean /= static_cast<double>(logbetas.size());
  double var = 0.0;
  for (double v : logbetas) var += (v - mean) * (v - mean);
  const double emp_sd = std::sqrt(var / (static_cast<double>(logbetas.size()) - 1.0));
  double mean_se = 0.0;
  for (double v : ses) mean_se += v;
  mean_se /= std::max<std::size_t>(1, ses.size());

  const double el = seconds_since(t0);
  ok = ok && std::abs(emp_sd / predicted - 1.0) <= 0.30 &&
       std::abs(mean_se / emp_sd - 1.0) <= 0.30 && el < 600.0;
  rep.line(9, "sandwich se calibrates against 200 poisson replications", ok,
           "empirical sd " + fmt("%.4f", emp_sd) + " vs predicted " +
               fmt("%.4f", predicted) + ", mean se " + fmt("%.4f", mean_se),
           el);
}

void criterion10(Reporter& rep, const std::string& cli) {
  const auto t0 = Clock::now();
  if (cli.empty()) {
    rep.line(10, "report.csv is byte-identical for 1, 4 and 8 workers", false,
             "--cli path not given", seconds_since(t0));
    return;
  }
  ExperimentSpec spec;
  spec.truth = {60.0, 0.1, 0.5};
  spec.windows = {Window({-1.0, -1.0}, {1.0, 1.0})};
  RegimeSpec reg;
  reg.name = "rinf";
  reg.alphas = {0.1};
  spec.regimes = {reg};
  spec.replications = 6;
  spec.base_seed = 10001;
  spec.mh.margin = 1.0;
  spec.mh.steps = 30000;
  spec.fit.grid = 40;
  spec.validate();

  const fs::path dir = fresh_dir("gibbs_acc_c10");
  const fs::path spec_path = dir / "spec.json";
  write_experiment_json(spec, spec_path.string());

  bool ok = true;
  std::vector<std::string> reports, estimates;
  for (int jobs : {1, 4, 8}) {
    const fs::path out = dir / ("jobs" + std::to_string(jobs));
    const std::string cmd = "\"" + cli + "\" experiment --spec \"" + spec_path.string() +
                            "\" --jobs " + std::to_string(jobs) + " --out \"" +
                            out.string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    const int exit_code = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
    // 2 flags an unreliable cell, which is a warning rather than a failure.
    ok = ok && (exit_code == 0 || exit_code == 2);
    reports.push_back(slurp(out / "report.csv"));
    estimates.push_back(slurp(out / "estimates.csv"));
  }
  ok = ok && !reports[0].empty() && !estimates[0].empty();
  ok = ok && reports[0] == reports[1] && reports[0] == reports[2];
  ok = ok && estimates[0] == estimates[1] && estimates[0] == estimates[2];
  fs::remove_all(dir);
  rep.line(10, "report.csv is byte-identical for 1, 4 and 8 workers", ok,
           std::to_string(reports[0].size()) + " report bytes", seconds_since(t0));
}

} // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  std::string cli;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      criterion = std::atoi(argv[++i]);
    } else if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N] [--cli PATH]\n");
      return 2;
    }
  }
  if (criterion < 0 || criterion > 10) {
    std::fprintf(stderr, "criterion must be 0 (all) .. 10\n");
    return 2;
  }

  Reporter rep;
  try {
    const bool all = criterion == 0;
    if (all || criterion == 1) criterion1(rep);
    if (all || criterion == 2) criterion2(rep);
    if (all || criterion == 3) criterion3(rep);
    if (all || criterion == 4) criterion4(rep);
    if (all || criterion == 5) criterion5(rep);
    if (all || criterion == 8) criterion8(rep);
    if (all || criterion == 9) criterion9(rep);
    if (all || criterion == 10) criterion10(rep, cli);
    if (all || criterion == 6 || criterion == 7) criterion6_7(rep);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
    return 1;
  }
  return rep.all_pass() ? 0 : 1;
}
