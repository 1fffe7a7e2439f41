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

#include "gibbs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gibbs/errors.hpp"

namespace gibbs {

double norm(Vec2 v) { return std::sqrt(norm2(v)); }

Window::Window(Vec2 lo_corner, Vec2 hi_corner) : lo(lo_corner), hi(hi_corner) {
  if (!(lo.x < hi.x && lo.y < hi.y)) {
    throw std::invalid_argument("Window: lo must be strictly below hi on both axes");
  }
  if (!std::isfinite(lo.x) || !std::isfinite(lo.y) || !std::isfinite(hi.x) ||
      !std::isfinite(hi.y)) {
    throw std::invalid_argument("Window: corners must be finite");
  }
}

double Window::min_side() const { return std::min(width(), height()); }

double Window::diameter() const { return std::hypot(width(), height()); }

double area(const Window& w) { return w.width() * w.height(); }

bool contains(const Window& w, Vec2 u) { return w.contains(u); }

Window erode(const Window& w, double kappa) {
  if (kappa < 0.0 || !std::isfinite(kappa)) {
    throw std::invalid_argument("erode: kappa must be a finite nonnegative real");
  }
  const Vec2 lo{w.lo.x + kappa, w.lo.y + kappa};
  const Vec2 hi{w.hi.x - kappa, w.hi.y - kappa};
  if (!(lo.x < hi.x && lo.y < hi.y)) {
    throw EmptyErosion("erode: window degenerate after shrinking by " +
                       std::to_string(kappa));
  }
  return Window(lo, hi);
}

Window expand(const Window& w, double margin) {
  if (margin < 0.0 || !std::isfinite(margin)) {
    throw std::invalid_argument("expand: margin must be a finite nonnegative real");
  }
  return Window({w.lo.x - margin, w.lo.y - margin}, {w.hi.x + margin, w.hi.y + margin});
}

namespace {

void validate_points(const std::vector<Vec2>& pts, const Window& w) {
  for (const Vec2& u : pts) {
    if (!w.contains(u)) {
      throw std::invalid_argument("Configuration: point outside the window");
    }
  }
  // Exact-equality duplicate check via a lexicographic sort of copies.
  std::vector<Vec2> sorted(pts);
  std::sort(sorted.begin(), sorted.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) {
      throw std::invalid_argument("Configuration: duplicate point rejected");
    }
  }
}

} // namespace

Configuration::Configuration(const Window& w) : win_(w) {}

Configuration::Configuration(std::vector<Vec2> points, const Window& w)
    : pts_(std::move(points)), win_(w) {
  validate_points(pts_, win_);
  xs_.reserve(pts_.size());
  ys_.reserve(pts_.size());
  for (const Vec2& u : pts_) {
    xs_.push_back(u.x);
    ys_.push_back(u.y);
  }
}

RangeIndex::RangeIndex(const Configuration& cfg, double radius)
    : cfg_(&cfg), radius_(radius), r2_(radius * radius), origin_(cfg.window().lo) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("RangeIndex: radius must be positive");
  }
  const Window& w = cfg.window();
  if (std::isfinite(radius)) {
    cell_ = radius;
    nx_ = std::max(1, static_cast<int>(std::ceil(w.width() / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(w.height() / cell_)));
  } else {
    cell_ = std::numeric_limits<double>::infinity();
    nx_ = ny_ = 1;
  }
  buckets_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
  const auto& pts = cfg.points();
  for (std::uint32_t i = 0; i < pts.size(); ++i) {
    int cx = 0, cy = 0;
    if (std::isfinite(cell_)) {
      cx = std::clamp(static_cast<int>(std::floor((pts[i].x - origin_.x) / cell_)), 0, nx_ - 1);
      cy = std::clamp(static_cast<int>(std::floor((pts[i].y - origin_.y) / cell_)), 0, ny_ - 1);
    }
    buckets_[static_cast<std::size_t>(cy) * nx_ + cx].push_back(i);
  }
}

void RangeIndex::query(Vec2 u, std::vector<std::uint32_t>& out) const {
  const auto& xs = cfg_->xs();
  const auto& ys = cfg_->ys();
  const std::size_t first = out.size();
  if (!std::isfinite(cell_)) {
    for (std::uint32_t i = 0; i < xs.size(); ++i) {
      const double dx = xs[i] - u.x;
      const double dy = ys[i] - u.y;
      if (dx * dx + dy * dy <= r2_) out.push_back(i);
    }
    return;
  }
  // Cells overlapping the disk's bounding box; u may lie outside the window.
  const int cx0 = std::max(0, static_cast<int>(std::floor((u.x - radius_ - origin_.x) / cell_)));
  const int cx1 = std::min(nx_ - 1, static_cast<int>(std::floor((u.x + radius_ - origin_.x) / cell_)));
  const int cy0 = std::max(0, static_cast<int>(std::floor((u.y - radius_ - origin_.y) / cell_)));
  const int cy1 = std::min(ny_ - 1, static_cast<int>(std::floor((u.y + radius_ - origin_.y) / cell_)));
  for (int cy = cy0; cy <= cy1; ++cy) {
    for (int cx = cx0; cx <= cx1; ++cx) {
      for (std::uint32_t i : buckets_[static_cast<std::size_t>(cy) * nx_ + cx]) {
        const double dx = xs[i] - u.x;
        const double dy = ys[i] - u.y;
        if (dx * dx + dy * dy <= r2_) out.push_back(i);
      }
    }
  }
  // Bucket scan order is row-major, so indices arrive unsorted across
  // buckets; canonicalize so downstream sums have one fixed order.
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

std::vector<Vec2> neighbors(const Configuration& cfg, Vec2 u, double R) {
  if (!(R > 0.0)) {
    throw std::invalid_argument("neighbors: R must be positive");
  }
  const double r2 = R * R;
  std::vector<Vec2> out;
  for (const Vec2& v : cfg.points()) {
    if (v == u) continue;
    const double d2 = norm2(v - u);
    if (d2 <= r2) out.push_back(v);
  }
  return out;
}

} // namespace gibbs
