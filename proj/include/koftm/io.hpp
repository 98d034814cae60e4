// Copyright 2026 The koftm authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KOFTM_IO_HPP
#define KOFTM_IO_HPP

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "koftm/model.hpp"

namespace koftm {

// Instance files are JSON Lines. The first record carries k, frame count,
// name and free-form metadata; every following record is one arrival
// subphase with a normative arrival order. Phases without arrivals are
// implied and never stored, so a trailing drain cannot leak into the file.
//
//   {"k": 3, "frames": 120, "name": "x", "meta": {}}
//   {"phase": 0, "arrivals": [{"frame": 1, "j": 1}, ...]}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void write_instance(const Instance& in, std::ostream& os) {
  nlohmann::json header = {{"k", in.k}, {"frames", in.n_frames}, {"name", in.name}, {"meta", in.meta}};
  os << header.dump() << '\n';
  for (std::size_t t = 0; t < in.phases.size(); ++t) {
    if (in.phases[t].empty()) continue;
    nlohmann::json arrivals = nlohmann::json::array();
    for (const PacketId& p : in.phases[t]) {
      arrivals.push_back({{"frame", p.frame}, {"j", p.j}});
    }
    nlohmann::json rec = {{"phase", static_cast<int>(t)}, {"arrivals", std::move(arrivals)}};
    os << rec.dump() << '\n';
  }
}

inline void write_instance(const Instance& in, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_instance(in, os);
}

inline Instance read_instance(std::istream& is, const std::string& origin = "<stream>") {
  Instance out;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  int max_phase = -1;
  std::vector<std::pair<int, std::vector<PacketId>>> records;

  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!have_header) {
        out.k = rec.at("k").get<int>();
        out.n_frames = rec.at("frames").get<int>();
        out.name = rec.value("name", std::string{});
        out.meta = rec.value("meta", nlohmann::json::object());
        have_header = true;
        continue;
      }
      const int phase = rec.at("phase").get<int>();
      if (phase < 0) throw ParseError(origin + ":" + std::to_string(line_no) + ": negative phase");
      std::vector<PacketId> arrivals;
      for (const auto& a : rec.at("arrivals")) {
        arrivals.push_back(PacketId{a.at("frame").get<int>(), a.at("j").get<int>()});
      }
      max_phase = std::max(max_phase, phase);
      records.emplace_back(phase, std::move(arrivals));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError(origin + ": missing header record");

  out.phases.assign(static_cast<std::size_t>(max_phase + 1), {});
  for (auto& [phase, arrivals] : records) {
    auto& slot = out.phases[static_cast<std::size_t>(phase)];
    // duplicate phase records concatenate in file order
    slot.insert(slot.end(), arrivals.begin(), arrivals.end());
  }
  return out;
}

inline Instance read_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_instance(is, path);
}

inline std::string instance_to_string(const Instance& in) {
  std::ostringstream os;
  write_instance(in, os);
  return os.str();
}

inline Instance instance_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_instance(is, "<string>");
}

}  // namespace koftm

#endif  // KOFTM_IO_HPP
