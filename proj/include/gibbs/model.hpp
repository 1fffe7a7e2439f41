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

#ifndef GIBBS_MODEL_HPP
#define GIBBS_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "gibbs/geometry.hpp"

namespace gibbs {

// Basis functions for the pair potential: g(v) = ||v||^-gamma, or
// e^{-||v||} ||v||^-gamma. Both blow up at the origin and decay at least
// like ||v||^-gamma, which is what keeps infinite-range sums summable.
enum class BasisForm { PowerLaw, ExpPower };

struct BasisFunction {
  BasisForm form = BasisForm::PowerLaw;
  double gamma = 6.0;

  // Evaluate from the squared distance (kernels carry r^2, not r).
  double eval_r2(double r2) const;
};

// Exponential-family pair potential Phi(v) = sum_{m>=2} theta_m g_m(v).
// basis[0] is g_2 and must carry the largest exponent gamma1; the smallest
// exponent gamma2 controls the integrable tail and must exceed the
// dimension d = 2. gamma2 > 4 (= 2d) is additionally needed for the
// normal-limit theory, so it is surfaced as a flag rather than an error.
struct ModelSpec {
  std::vector<BasisFunction> basis; // g_2 .. g_p
  double r0 = 1.0;                  // tail threshold for diagnostics

  int p() const { return static_cast<int>(basis.size()) + 1; }
  double gamma1() const; // max exponent (0 when basis empty)
  double gamma2() const; // min exponent (0 when basis empty)
  bool clt_exponent_ok() const;
  bool scale_free() const; // every basis term is a pure power law

  void validate() const; // throws std::invalid_argument

  static ModelSpec poisson();
  static ModelSpec lennard_jones(double r0 = 0.1);
  static ModelSpec power_law(const std::vector<double>& gammas, double r0 = 1.0);
};

// Natural parameter vector; v[0] = theta_1 = -log(beta), v[m-1] = theta_m.
struct ThetaNatural {
  std::vector<double> v;

  int p() const { return static_cast<int>(v.size()); }
};

// Physical Lennard-Jones parametrization: activity beta, range sigma,
// interaction strength epsilon, with the repulsive-core convention
// Phi(v) = 4 eps { (sigma/r)^12 - (sigma/r)^6 }.
struct LJParams {
  double beta = 0.0;
  double sigma = 0.0;
  double epsilon = 0.0;
};

// theta_1 = -log beta, theta_2 = 4 eps sigma^12, theta_3 = -4 eps sigma^6.
ThetaNatural lj_to_natural(const LJParams& params);

// Inverse map sigma = (-theta2/theta3)^(1/6), eps = theta3^2/(4 theta2).
// Empty when the signs do not describe a Lennard-Jones potential
// (theta2 <= 0 or theta3 >= 0); epsilon = 0 fits are reported this way too,
// because sigma is unidentifiable there.
std::optional<LJParams> natural_to_lj(const ThetaNatural& theta);

// Checks dimensions and the theta_2 > 0 requirement that makes the energy
// bounded below (a valid Gibbs model). Fitting does not impose this; the
// sampler and physical-parameter conversions do.
void validate_natural(const ModelSpec& m, const ThetaNatural& theta);

// Phi(v); throws Singularity when v = 0 exactly.
double pair_potential(const ModelSpec& m, const ThetaNatural& theta, Vec2 v);

// t(u, x_{u,R}) = (1, sum g_2(v-u), ..., sum g_p(v-u)) over the points of
// cfg within distance R of u. With exclude_u, a point exactly at u is
// removed from the sum (u itself when summing over data points); without
// it, a coincident point throws Singularity.
std::vector<double> sufficient_stats(const ModelSpec& m, const Configuration& cfg,
                                     Vec2 u, double R, bool exclude_u);

// lambda_theta(u, x_{u,R}) = exp(-theta^T t); equals beta on an empty
// configuration. Energy overflow (a sufficient statistic too large to
// represent) clamps lambda to +0 and sets *overflow when provided.
double papangelou(const ModelSpec& m, const ThetaNatural& theta, const Configuration& cfg,
                  Vec2 u, double R, bool* overflow = nullptr);

// Tail sums used by truncation-error diagnostics:
//   G = sum ||v-u||^-gamma2 over ||v-u|| >= r0,
//   H = sum ||v-u||^-(2+eps_tail) over ||v-u|| >= r0.
struct TailStats {
  double G = 0.0;
  double H = 0.0;
};
TailStats tail_stats(const Configuration& cfg, Vec2 u, double r0, double gamma2,
                     double eps_tail);

// Model file: {"family": "lj"|"powerlaw"|"poisson", ...}. The natural
// parameter vector is always serialized and, when present on read, is
// preferred over re-deriving it from the physical fields, so round trips
// are exact.
struct ModelFile {
  std::string family; // "lj", "powerlaw", "poisson"
  ModelSpec spec;
  ThetaNatural theta;
  std::optional<LJParams> physical;
};

ModelFile read_model_json(const std::string& path);
void write_model_json(const ModelFile& mf, const std::string& path);
ModelFile make_lj_model(const LJParams& params);

} // namespace gibbs

#endif // GIBBS_MODEL_HPP
