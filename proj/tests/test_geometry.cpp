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
#include <vector>

#include "doctest.h"
#include "gibbs/errors.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/rng.hpp"

using namespace gibbs;

namespace {

std::vector<Vec2> random_points(RandomStream& rng, const Window& w, int n) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pts.push_back({rng.uniform(w.lo.x, w.hi.x), rng.uniform(w.lo.y, w.hi.y)});
  }
  return pts;
}

std::vector<std::uint32_t> brute_force_query(const Configuration& cfg, Vec2 u, double r) {
  std::vector<std::uint32_t> out;
  const double r2 = r * r;
  const auto& pts = cfg.points();
  for (std::uint32_t i = 0; i < pts.size(); ++i) {
    if (norm2(pts[i] - u) <= r2) out.push_back(i);
  }
  return out;
}

} // namespace

TEST_CASE("Window validates corners and measures itself") {
  CHECK_THROWS_AS(Window({0.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Window({0.0, 2.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Window({0.0, 0.0}, {std::numeric_limits<double>::infinity(), 1.0}),
                  std::invalid_argument);

  const Window w({-1.0, 0.5}, {3.0, 2.5});
  CHECK(w.width() == 4.0);
  CHECK(w.height() == 2.0);
  CHECK(w.min_side() == 2.0);
  CHECK(area(w) == 8.0);
  CHECK(w.diameter() == doctest::Approx(std::sqrt(20.0)).epsilon(1e-15));
  CHECK(w.contains({-1.0, 0.5})); // closed edges
  CHECK(w.contains({3.0, 2.5}));
  CHECK_FALSE(w.contains({3.0000001, 1.0}));
}

TEST_CASE("erode and expand are exact rectangle operations") {
  const Window w({0.0, 0.0}, {4.0, 2.0});
  const Window e = erode(w, 0.5);
  CHECK(e.lo == Vec2{0.5, 0.5});
  CHECK(e.hi == Vec2{3.5, 1.5});
  CHECK_THROWS_AS(erode(w, 1.0), EmptyErosion);
  CHECK_THROWS_AS(erode(w, 5.0), EmptyErosion);
  CHECK_THROWS_AS(erode(w, -0.1), std::invalid_argument);
  CHECK(area(erode(w, 0.0)) == area(w));

  const Window x = expand(w, 2.0);
  CHECK(x.lo == Vec2{-2.0, -2.0});
  CHECK(x.hi == Vec2{6.0, 4.0});
  CHECK_THROWS_AS(expand(w, -1.0), std::invalid_argument);
  // Round trip: expanding then eroding by the same margin restores the box.
  const Window back = erode(x, 2.0);
  CHECK(back.lo == w.lo);
  CHECK(back.hi == w.hi);
}

TEST_CASE("Configuration enforces containment and uniqueness") {
  const Window w({0.0, 0.0}, {1.0, 1.0});
  CHECK_THROWS_AS(Configuration({{0.5, 0.5}, {1.5, 0.5}}, w), std::invalid_argument);
  CHECK_THROWS_AS(Configuration({{0.5, 0.5}, {0.5, 0.5}}, w), std::invalid_argument);

  const Configuration empty(w);
  CHECK(empty.size() == 0);

  const Configuration cfg({{0.25, 0.75}, {0.5, 0.5}, {1.0, 0.0}}, w);
  CHECK(cfg.size() == 3);
  CHECK(cfg.xs() == std::vector<double>{0.25, 0.5, 1.0});
  CHECK(cfg.ys() == std::vector<double>{0.75, 0.5, 0.0});
  CHECK(cfg.points()[2] == Vec2{1.0, 0.0});
}

TEST_CASE("RangeIndex agrees with brute force on random instances") {
  RandomStream rng(77, 0);
  const double inf = std::numeric_limits<double>::infinity();
  int nonempty_results = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    const double w0 = rng.uniform(-5.0, 5.0);
    const double h0 = rng.uniform(-5.0, 5.0);
    const Window w({w0, h0}, {w0 + rng.uniform(0.2, 6.0), h0 + rng.uniform(0.2, 6.0)});
    const int n = static_cast<int>(rng.uniform(0.0, 60.0));
    const Configuration cfg(random_points(rng, w, n), w);

    double radius;
    const double pick = rng.uniform();
    if (pick < 0.2) {
      radius = inf;
    } else if (pick < 0.4) {
      radius = w.diameter() * 2.0; // finite but covers everything
    } else {
      radius = rng.uniform(0.01, 0.6 * w.diameter());
    }
    const RangeIndex index(cfg, radius);
    CHECK(index.radius() == radius);

    for (int q = 0; q < 4; ++q) {
      // Queries inside, near the boundary and well outside the window.
      const double pad = (q == 3) ? 2.0 : 0.0;
      const Vec2 u{rng.uniform(w.lo.x - pad, w.hi.x + pad),
                   rng.uniform(w.lo.y - pad, w.hi.y + pad)};
      std::vector<std::uint32_t> got;
      index.query(u, got);
      const std::vector<std::uint32_t> want = brute_force_query(cfg, u, radius);
      CHECK(got == want); // equality includes the ascending-order contract
      if (!got.empty()) ++nonempty_results;
    }
  }
  CHECK(nonempty_results > 500); // the sweep actually exercised hits
}

TEST_CASE("RangeIndex finds coincident points and appends to out") {
  const Window w({0.0, 0.0}, {1.0, 1.0});
  const Configuration cfg({{0.5, 0.5}, {0.9, 0.9}}, w);
  const RangeIndex index(cfg, 0.1);
  std::vector<std::uint32_t> out = {99};
  index.query({0.5, 0.5}, out);
  CHECK(out == std::vector<std::uint32_t>{99, 0});
  CHECK_THROWS_AS(RangeIndex(cfg, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RangeIndex(cfg, -1.0), std::invalid_argument);
}

TEST_CASE("neighbors excludes the query point exactly") {
  const Window w({0.0, 0.0}, {1.0, 1.0});
  const Configuration cfg({{0.2, 0.2}, {0.3, 0.2}, {0.8, 0.8}}, w);
  const auto nb = neighbors(cfg, {0.2, 0.2}, 0.5);
  REQUIRE(nb.size() == 1);
  CHECK(nb[0] == Vec2{0.3, 0.2});
  // A non-member query point keeps everything in range.
  const auto nb2 = neighbors(cfg, {0.25, 0.2}, 10.0);
  CHECK(nb2.size() == 3);
  CHECK_THROWS_AS(neighbors(cfg, {0.0, 0.0}, 0.0), std::invalid_argument);
}
