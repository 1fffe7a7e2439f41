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

#ifndef GIBBS_GEOMETRY_HPP
#define GIBBS_GEOMETRY_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gibbs {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }
double norm(Vec2 v);

// Axis-aligned rectangle with lo < hi on both axes. All experiment windows
// are rectangles, and a rectangle eroded by a Euclidean disk is again a
// rectangle, so erosion is exact.
struct Window {
  Vec2 lo;
  Vec2 hi;

  Window(Vec2 lo_corner, Vec2 hi_corner); // validates lo < hi per axis

  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double min_side() const;
  double diameter() const; // length of the diagonal
  bool contains(Vec2 u) const { // closed on all edges
    return u.x >= lo.x && u.x <= hi.x && u.y >= lo.y && u.y <= hi.y;
  }
};

double area(const Window& w);
bool contains(const Window& w, Vec2 u);

// Shrinks the window by kappa on every side. Throws EmptyErosion when the
// result is degenerate or empty.
Window erode(const Window& w, double kappa);

// Expands the window by margin on every side.
Window expand(const Window& w, double margin);

// A finite planar point pattern together with its observation window.
// Immutable after construction: every point must lie inside the (closed)
// window and exact coordinate duplicates are rejected.
class Configuration {
public:
  explicit Configuration(const Window& w);
  Configuration(std::vector<Vec2> points, const Window& w);

  std::size_t size() const { return pts_.size(); }
  const std::vector<Vec2>& points() const { return pts_; }
  const Window& window() const { return win_; }

  // Structure-of-arrays views consumed by the accumulation kernels.
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }

private:
  std::vector<Vec2> pts_;
  std::vector<double> xs_, ys_;
  Window win_;
};

// Uniform bucket grid for repeated fixed-radius queries. The cell size
// equals the query radius when it is finite (one ring of cells suffices),
// otherwise a single bucket holds everything.
class RangeIndex {
public:
  RangeIndex(const Configuration& cfg, double radius); // radius > 0, may be inf

  // Appends (ascending) the indices of all points with ||v - u||^2 <= radius^2,
  // including any point exactly coincident with u; callers decide how to
  // treat zero separations. u may lie anywhere in the plane.
  void query(Vec2 u, std::vector<std::uint32_t>& out) const;

  double radius() const { return radius_; }

private:
  const Configuration* cfg_;
  double radius_;
  double r2_;
  double cell_;
  int nx_ = 1, ny_ = 1;
  Vec2 origin_;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

// All points v of cfg with ||v - u|| <= R and v != u (exact coordinate
// comparison). Plain linear scan; use RangeIndex for repeated queries.
std::vector<Vec2> neighbors(const Configuration& cfg, Vec2 u, double R);

} // namespace gibbs

#endif // GIBBS_GEOMETRY_HPP
