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

#ifndef KOFTM_TRACE_HPP
#define KOFTM_TRACE_HPP

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "koftm/model.hpp"

namespace koftm {

enum class Actor { MF, GR1, SP, GREEDY };

enum class TraceAction { Accept, Reject, Preempt, Flush, Transmit };

inline const char* to_string(Actor a) {
  switch (a) {
    case Actor::MF: return "MF";
    case Actor::GR1: return "GR1";
    case Actor::SP: return "SP";
    case Actor::GREEDY: return "GREEDY";
  }
  return "?";
}

inline const char* to_string(TraceAction a) {
  switch (a) {
    case TraceAction::Accept: return "accept";
    case TraceAction::Reject: return "reject";
    case TraceAction::Preempt: return "preempt";
    case TraceAction::Flush: return "flush";
    case TraceAction::Transmit: return "transmit";
  }
  return "?";
}

inline Actor actor_from_string(const std::string& s) {
  if (s == "MF") return Actor::MF;
  if (s == "GR1") return Actor::GR1;
  if (s == "SP") return Actor::SP;
  if (s == "GREEDY") return Actor::GREEDY;
  throw std::invalid_argument("unknown actor: " + s);
}

inline TraceAction action_from_string(const std::string& s) {
  if (s == "accept") return TraceAction::Accept;
  if (s == "reject") return TraceAction::Reject;
  if (s == "preempt") return TraceAction::Preempt;
  if (s == "flush") return TraceAction::Flush;
  if (s == "transmit") return TraceAction::Transmit;
  throw std::invalid_argument("unknown action: " + s);
}

// One decision or delivery effect. Decision slots of a phase get seq
// 0..n-1 in processing order; every event a decision emits (the shadow GR1
// verdict, preemptions, the accept/reject itself, flush removals) shares its
// seq. The delivery subphase uses seq == number of decisions, so decisions
// of a phase always order strictly before its delivery.
//
// `block` is the MF block number of the event packet's frame, 0 when not
// assigned or not applicable (GR1 rows, SP/GREEDY runs).
struct TraceEvent {
  int phase = 0;
  int seq = 0;
  PacketId packet;
  Actor actor = Actor::MF;
  TraceAction action = TraceAction::Accept;
  std::string case_label;
  int block = 0;

  EventTime time() const { return EventTime{phase, seq}; }

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using Trace = std::vector<TraceEvent>;

inline std::string to_string(const TraceEvent& e) {
  std::ostringstream os;
  os << e.phase << ',' << e.seq << ',' << e.packet.frame << ',' << e.packet.j << ','
     << to_string(e.actor) << ',' << to_string(e.action) << ',' << e.case_label << ',';
  if (e.block > 0) os << e.block;
  return os.str();
}

// CSV format is fixed: header plus one event per line, fields exactly as
// rendered by to_string(TraceEvent). Writers must stay bit-exact because the
// execution-example golden test compares files byte for byte.
inline void write_trace_csv(const Trace& trace, std::ostream& os) {
  os << "phase,seq,frame,j,actor,action,case,block\n";
  for (const TraceEvent& e : trace) os << to_string(e) << '\n';
}

inline void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_trace_csv(trace, os);
}

inline Trace read_trace_csv(std::istream& is, const std::string& origin = "<stream>") {
  Trace out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "phase,seq,frame,j,actor,action,case,block")
        throw std::runtime_error(origin + ":1: unexpected trace header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        f.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (f.size() != 8) throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": expected 8 fields");
    try {
      TraceEvent e;
      e.phase = std::stoi(f[0]);
      e.seq = std::stoi(f[1]);
      e.packet = PacketId{std::stoi(f[2]), std::stoi(f[3])};
      e.actor = actor_from_string(f[4]);
      e.action = action_from_string(f[5]);
      e.case_label = f[6];
      e.block = f[7].empty() ? 0 : std::stoi(f[7]);
      out.push_back(std::move(e));
    } catch (const std::exception& e) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline Trace read_trace_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_trace_csv(is, path);
}

struct TraceDiff {
  std::size_t index = 0;
  std::string expected;  // empty when the actual trace has an extra row
  std::string actual;    // empty when a golden row is missing
};

inline bool is_decision_action(TraceAction a) { return a != TraceAction::Transmit; }

inline Trace decision_events(const Trace& t) {
  Trace out;
  for (const TraceEvent& e : t) {
    if (is_decision_action(e.action)) out.push_back(e);
  }
  return out;
}

// Event-tuple comparison of the decision rows (accept/reject/preempt/flush)
// of two traces. Transmissions are execution bookkeeping and not part of a
// golden decision list. Empty result means the traces agree.
inline std::vector<TraceDiff> compare_traces(const Trace& actual, const Trace& golden) {
  const Trace a = decision_events(actual);
  const Trace g = decision_events(golden);
  std::vector<TraceDiff> diff;
  const std::size_t n = std::max(a.size(), g.size());
  for (std::size_t i = 0; i < n; ++i) {
    const bool have_a = i < a.size();
    const bool have_g = i < g.size();
    if (have_a && have_g && a[i] == g[i]) continue;
    diff.push_back(TraceDiff{i, have_g ? to_string(g[i]) : std::string{},
                             have_a ? to_string(a[i]) : std::string{}});
  }
  return diff;
}

}  // namespace koftm

#endif  // KOFTM_TRACE_HPP
