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

#ifndef GIBBS_PATTERN_IO_HPP
#define GIBBS_PATTERN_IO_HPP

#include <string>

#include "gibbs/geometry.hpp"

namespace gibbs {

// Point-pattern JSON: {"window": [[x0,x1],[y0,y1]], "points": [[x,y], ...]}.
// Coordinates are written with shortest round-trip decimals, so
// write -> read reproduces every double bit for bit.
Configuration read_pattern_json(const std::string& path);
void write_pattern_json(const Configuration& cfg, const std::string& path);

// CSV alternative: header "x,y" plus one point per row, with the window in
// a JSON sidecar (<stem>.meta.json holding {"window": ...}).
Configuration read_pattern_csv(const std::string& path);
void write_pattern_csv(const Configuration& cfg, const std::string& path);
std::string pattern_sidecar_path(const std::string& csv_path);

} // namespace gibbs

#endif // GIBBS_PATTERN_IO_HPP
