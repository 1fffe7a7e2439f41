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

#ifndef GIBBS_SIMULATE_HPP
#define GIBBS_SIMULATE_HPP

#include <cstdint>

#include "gibbs/geometry.hpp"
#include "gibbs/model.hpp"

namespace gibbs {

// Birth-death-move Metropolis-Hastings tuning. The chain runs on the target
// window extended by `margin` per side and the final state is clipped back,
// which is the standard way to blunt the missing interactions from outside
// the simulation region.
struct MHConfig {
  std::uint64_t n_steps = 100000; // must be >= 1
  double p_shift = 1.0 / 3.0;     // probability of a move proposal
  double shift_scale = 0.1;       // std dev of the Gaussian displacement
  double margin = 2.0;            // extension of the target window per side
  std::uint64_t seed = 0;
};

// Default chain length: max(1e5, 200 * ceil(beta * area(S))), i.e. roughly
// 200 proposals per expected point of the extended window S.
std::uint64_t default_mh_steps(double beta, double area_extended);

// Runs the chain from an empty state and returns the final state on the
// extended window S (not clipped); exposed for calibration tests.
// Throws NonErgodicConfig when cfg.n_steps == 0.
Configuration mh_run(const ModelSpec& m, const ThetaNatural& theta,
                     const Window& target, const MHConfig& cfg,
                     std::uint64_t stream = 0);

// mh_run followed by clipping to the target window.
Configuration mh_sample(const ModelSpec& m, const ThetaNatural& theta,
                        const Window& target, const MHConfig& cfg,
                        std::uint64_t stream = 0);

// Keeps exactly the points inside target and replaces the window metadata.
// Throws WindowMismatch when target is not contained in cfg's window.
Configuration clip(const Configuration& cfg, const Window& target);

} // namespace gibbs

#endif // GIBBS_SIMULATE_HPP
