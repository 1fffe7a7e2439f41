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
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "gibbs/errors.hpp"
#include "gibbs/kernels.hpp"
#include "gibbs/model.hpp"
#include "internal/basis_plan.hpp"

namespace gibbs {

double BasisFunction::eval_r2(double r2) const {
  const detail::BasisPlan plan = detail::make_plan(*this);
  return detail::eval_plan(plan, r2, 1.0 / r2);
}

double ModelSpec::gamma1() const {
  double g = 0.0;
  for (const BasisFunction& b : basis) g = std::max(g, b.gamma);
  return g;
}

double ModelSpec::gamma2() const {
  if (basis.empty()) return 0.0;
  double g = basis.front().gamma;
  for (const BasisFunction& b : basis) g = std::min(g, b.gamma);
  return g;
}

bool ModelSpec::clt_exponent_ok() const { return basis.empty() || gamma2() > 4.0; }

bool ModelSpec::scale_free() const {
  return std::all_of(basis.begin(), basis.end(),
                     [](const BasisFunction& b) { return b.form == BasisForm::PowerLaw; });
}

void ModelSpec::validate() const {
  if (!(r0 > 0.0) || !std::isfinite(r0))
    throw std::invalid_argument("ModelSpec: r0 must be positive and finite");
  for (const BasisFunction& b : basis) {
    if (!std::isfinite(b.gamma) || !(b.gamma > 2.0))
      throw std::invalid_argument(
          "ModelSpec: basis exponents must exceed the dimension 2 for a summable tail");
  }
  if (!basis.empty() && basis.front().gamma != gamma1())
    throw std::invalid_argument("ModelSpec: basis[0] must carry the largest exponent");
}

ModelSpec ModelSpec::poisson() { return ModelSpec{{}, 1.0}; }

ModelSpec ModelSpec::lennard_jones(double r0) {
  return ModelSpec{{BasisFunction{BasisForm::PowerLaw, 12.0},
                    BasisFunction{BasisForm::PowerLaw, 6.0}},
                   r0};
}

ModelSpec ModelSpec::power_law(const std::vector<double>& gammas, double r0) {
  ModelSpec m;
  m.r0 = r0;
  for (double g : gammas) m.basis.push_back(BasisFunction{BasisForm::PowerLaw, g});
  m.validate();
  return m;
}

ThetaNatural lj_to_natural(const LJParams& params) {
  if (!(params.beta > 0.0) || !std::isfinite(params.beta))
    throw std::invalid_argument("lj_to_natural: beta must be positive");
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma))
    throw std::invalid_argument("lj_to_natural: sigma must be positive");
  if (!(params.epsilon >= 0.0) || !std::isfinite(params.epsilon))
    throw std::invalid_argument("lj_to_natural: epsilon must be nonnegative");
  const double s6 = std::pow(params.sigma, 6.0);
  return ThetaNatural{{-std::log(params.beta),
                       4.0 * params.epsilon * s6 * s6,
                       -4.0 * params.epsilon * s6}};
}

std::optional<LJParams> natural_to_lj(const ThetaNatural& theta) {
  if (theta.p() != 3) return std::nullopt;
  const double t2 = theta.v[1];
  const double t3 = theta.v[2];
  if (!(t2 > 0.0) || !(t3 < 0.0)) return std::nullopt;
  LJParams params;
  params.beta = std::exp(-theta.v[0]);
  params.sigma = std::pow(-t2 / t3, 1.0 / 6.0);
  params.epsilon = t3 * t3 / (4.0 * t2);
  return params;
}

void validate_natural(const ModelSpec& m, const ThetaNatural& theta) {
  if (theta.p() != m.p())
    throw std::invalid_argument("validate_natural: theta has " +
                                std::to_string(theta.p()) + " entries, model needs " +
                                std::to_string(m.p()));
  for (double t : theta.v)
    if (!std::isfinite(t)) throw std::invalid_argument("validate_natural: nonfinite theta");
  if (m.p() >= 2 && !(theta.v[1] > 0.0))
    throw std::invalid_argument(
        "validate_natural: the coefficient on the steepest basis term must be positive "
        "so the energy is bounded below");
}

double pair_potential(const ModelSpec& m, const ThetaNatural& theta, Vec2 v) {
  const double r2 = norm2(v);
  if (r2 == 0.0) throw Singularity("pair_potential: zero separation");
  double phi = 0.0;
  for (std::size_t b = 0; b < m.basis.size(); ++b)
    phi += theta.v[b + 1] * m.basis[b].eval_r2(r2);
  return phi;
}

std::vector<double> sufficient_stats(const ModelSpec& m, const Configuration& cfg,
                                     Vec2 u, double R, bool exclude_u) {
  if (!(R > 0.0)) throw std::invalid_argument("sufficient_stats: R must be positive");
  std::vector<double> t(static_cast<std::size_t>(m.p()), 0.0);
  t[0] = 1.0;
  const kernels::AccumResult res =
      kernels::accumulate_stats(cfg.xs().data(), cfg.ys().data(), cfg.size(),
                                u.x, u.y, R * R, m, t.data() + 1);
  if (!exclude_u && res.zero_hits > 0)
    throw Singularity("sufficient_stats: a configuration point coincides with u");
  return t;
}

double papangelou(const ModelSpec& m, const ThetaNatural& theta, const Configuration& cfg,
                  Vec2 u, double R, bool* overflow) {
  if (overflow != nullptr) *overflow = false;
  const std::vector<double> t = sufficient_stats(m, cfg, u, R, false);
  double energy = 0.0;
  for (int j = 0; j < m.p(); ++j) energy += theta.v[static_cast<std::size_t>(j)] * t[static_cast<std::size_t>(j)];
  if (std::isnan(energy)) energy = std::numeric_limits<double>::infinity();
  const double lambda = std::exp(-energy);
  if (lambda == 0.0 && overflow != nullptr) *overflow = true;
  return lambda;
}

TailStats tail_stats(const Configuration& cfg, Vec2 u, double r0, double gamma2,
                     double eps_tail) {
  if (!(r0 > 0.0)) throw std::invalid_argument("tail_stats: r0 must be positive");
  if (!(gamma2 > 2.0)) throw std::invalid_argument("tail_stats: gamma2 must exceed 2");
  if (!(eps_tail > 0.0)) throw std::invalid_argument("tail_stats: eps_tail must be positive");
  TailStats ts;
  const double r02 = r0 * r0;
  const std::vector<double>& xs = cfg.xs();
  const std::vector<double>& ys = cfg.ys();
  for (std::size_t k = 0; k < cfg.size(); ++k) {
    const double dx = xs[k] - u.x;
    const double dy = ys[k] - u.y;
    const double r2 = dx * dx + dy * dy;
    if (!(r2 >= r02)) continue;
    ts.G += std::pow(r2, -0.5 * gamma2);
    ts.H += std::pow(r2, -0.5 * (2.0 + eps_tail));
  }
  return ts;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void store_json(const ordered_json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<double> read_vector(const ordered_json& j, const char* key) {
  std::vector<double> v;
  for (const auto& x : j.at(key)) v.push_back(x.get<double>());
  return v;
}

} // namespace

ModelFile read_model_json(const std::string& path) {
  const ordered_json j = load_json(path);
  ModelFile mf;
  mf.family = j.at("family").get<std::string>();
  if (mf.family == "lj") {
    LJParams params;
    bool have_physical = j.contains("beta") && j.contains("sigma") && j.contains("epsilon");
    if (have_physical) {
      params.beta = j.at("beta").get<double>();
      params.sigma = j.at("sigma").get<double>();
      params.epsilon = j.at("epsilon").get<double>();
    }
    double r0 = j.value("r0", have_physical && params.sigma > 0.0 ? params.sigma : 0.1);
    mf.spec = ModelSpec::lennard_jones(r0);
    if (j.contains("natural")) {
      mf.theta.v = read_vector(j, "natural");
    } else if (have_physical) {
      mf.theta = lj_to_natural(params);
    } else {
      throw std::runtime_error(path + ": lj model needs either natural or beta/sigma/epsilon");
    }
    mf.physical = have_physical ? std::optional<LJParams>(params) : natural_to_lj(mf.theta);
  } else if (mf.family == "poisson") {
    mf.spec = ModelSpec::poisson();
    if (j.contains("natural")) {
      mf.theta.v = read_vector(j, "natural");
    } else if (j.contains("beta")) {
      mf.theta.v = {-std::log(j.at("beta").get<double>())};
    } else {
      throw std::runtime_error(path + ": poisson model needs natural or beta");
    }
  } else if (mf.family == "powerlaw") {
    mf.spec = ModelSpec::power_law(read_vector(j, "gammas"), j.value("r0", 1.0));
    if (j.contains("natural")) {
      mf.theta.v = read_vector(j, "natural");
    } else if (j.contains("theta")) {
      mf.theta.v = read_vector(j, "theta");
    } else {
      throw std::runtime_error(path + ": powerlaw model needs natural or theta");
    }
  } else {
    throw std::runtime_error(path + ": unknown family '" + mf.family + "'");
  }
  if (mf.theta.p() != mf.spec.p())
    throw std::runtime_error(path + ": parameter vector has wrong length");
  return mf;
}

void write_model_json(const ModelFile& mf, const std::string& path) {
  ordered_json j;
  j["family"] = mf.family;
  if (mf.family == "lj" && mf.physical) {
    j["beta"] = mf.physical->beta;
    j["sigma"] = mf.physical->sigma;
    j["epsilon"] = mf.physical->epsilon;
  }
  if (mf.family == "poisson") {
    j["beta"] = std::exp(-mf.theta.v.at(0));
  }
  if (mf.family == "powerlaw") {
    ordered_json gammas = ordered_json::array();
    for (const BasisFunction& b : mf.spec.basis) gammas.push_back(b.gamma);
    j["gammas"] = gammas;
  }
  if (mf.family != "poisson") j["r0"] = mf.spec.r0;
  j["natural"] = mf.theta.v;
  store_json(j, path);
}

ModelFile make_lj_model(const LJParams& params) {
  ModelFile mf;
  mf.family = "lj";
  mf.spec = ModelSpec::lennard_jones(params.sigma > 0.0 ? params.sigma : 0.1);
  mf.theta = lj_to_natural(params);
  mf.physical = params;
  return mf;
}

} // namespace gibbs
