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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "gibbs/numeric.hpp"
#include "gibbs/pattern_io.hpp"

namespace gibbs {

namespace {

using ordered_json = nlohmann::ordered_json;

Window window_from_json(const ordered_json& jw, const std::string& path) {
  if (!jw.is_array() || jw.size() != 2 || jw[0].size() != 2 || jw[1].size() != 2)
    throw std::runtime_error(path + ": window must be [[x0,x1],[y0,y1]]");
  return Window{{jw[0][0].get<double>(), jw[1][0].get<double>()},
                {jw[0][1].get<double>(), jw[1][1].get<double>()}};
}

// Integer-looking tokens such as "-0" would be re-read through the JSON
// integer path, which drops the sign of negative zero; force a float form.
std::string json_number(double v) {
  std::string s = format_double(v);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

} // namespace

Configuration read_pattern_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  const Window w = window_from_json(j.at("window"), path);
  std::vector<Vec2> pts;
  for (const auto& row : j.at("points")) {
    if (!row.is_array() || row.size() != 2)
      throw std::runtime_error(path + ": each point must be [x,y]");
    pts.push_back(Vec2{row[0].get<double>(), row[1].get<double>()});
  }
  return Configuration(std::move(pts), w);
}

void write_pattern_json(const Configuration& cfg, const std::string& path) {
  // Hand-rolled writer: shortest round-trip decimals, one point per line,
  // so patterns diff cleanly and re-read bit for bit.
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  const Window& w = cfg.window();
  out << "{\n  \"window\": [[" << json_number(w.lo.x) << ", " << json_number(w.hi.x)
      << "], [" << json_number(w.lo.y) << ", " << json_number(w.hi.y) << "]],\n";
  out << "  \"points\": [";
  for (std::size_t k = 0; k < cfg.size(); ++k) {
    out << (k == 0 ? "\n" : ",\n");
    out << "    [" << json_number(cfg.xs()[k]) << ", " << json_number(cfg.ys()[k]) << "]";
  }
  out << (cfg.size() == 0 ? "]\n" : "\n  ]\n") << "}\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string pattern_sidecar_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".meta.json");
  return p.string();
}

Configuration read_pattern_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (line == "x,y\r") line = "x,y";
  if (line != "x,y") throw std::runtime_error(path + ": expected header 'x,y'");
  std::vector<Vec2> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'x,y'");
    pts.push_back(Vec2{parse_double(line.substr(0, comma)),
                       parse_double(line.substr(comma + 1))});
  }

  const std::string side = pattern_sidecar_path(path);
  std::ifstream meta(side);
  if (!meta) throw std::runtime_error("cannot open sidecar " + side);
  ordered_json j;
  try {
    j = ordered_json::parse(meta);
  } catch (const std::exception& e) {
    throw std::runtime_error(side + ": " + e.what());
  }
  return Configuration(std::move(pts), window_from_json(j.at("window"), side));
}

void write_pattern_csv(const Configuration& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,y\n";
  for (std::size_t k = 0; k < cfg.size(); ++k)
    out << format_double(cfg.xs()[k]) << ',' << format_double(cfg.ys()[k]) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);

  std::ofstream meta(pattern_sidecar_path(path), std::ios::trunc);
  if (!meta) throw std::runtime_error("cannot write sidecar for " + path);
  const Window& w = cfg.window();
  meta << "{\"window\": [[" << json_number(w.lo.x) << ", " << json_number(w.hi.x)
       << "], [" << json_number(w.lo.y) << ", " << json_number(w.hi.y) << "]]}\n";
  if (!meta) throw std::runtime_error("write failed for sidecar of " + path);
}

} // namespace gibbs
