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

#ifndef KOFTM_MODEL_HPP
#define KOFTM_MODEL_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace koftm {

// Thrown when a policy or checker detects a broken internal invariant.
// These are bugs, never data errors, and must abort the run loudly.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

// One packet: the j-th fragment of a frame. A frame counts toward the gain
// only if all k of its packets are transmitted.
struct PacketId {
  int frame = 0;  // 1-based frame index
  int j = 0;      // within-frame index, 1..k, in arrival order

  friend bool operator==(const PacketId&, const PacketId&) = default;
  friend auto operator<=>(const PacketId&, const PacketId&) = default;
};

// A point on the per-phase timeline. Each phase holds the decision slots of
// its arrival subphase (seq 0..n-1) followed by one delivery slot
// (seq == number of decisions). All decisions of a phase order strictly
// before its delivery.
struct EventTime {
  int phase = 0;
  int seq = 0;

  friend bool operator==(const EventTime&, const EventTime&) = default;
  friend auto operator<=>(const EventTime&, const EventTime&) = default;
};

// Full arrival schedule. phases[t] is the ordered arrival list of the t-th
// arrival subphase; list order is the tie-break order for same-subphase
// processing and is part of the instance. Empty lists are stored explicitly
// so every phase still has a delivery subphase.
struct Instance {
  int k = 1;
  int n_frames = 0;
  std::string name;
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::vector<PacketId>> phases;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Largest phase with at least one arrival, or -1 when no packet arrives.
inline int last_arrival_phase(const Instance& in) {
  for (int t = static_cast<int>(in.phases.size()) - 1; t >= 0; --t) {
    if (!in.phases[t].empty()) return t;
  }
  return -1;
}

inline int total_packets(const Instance& in) {
  int n = 0;
  for (const auto& ph : in.phases) n += static_cast<int>(ph.size());
  return n;
}

// Extends the schedule with B + (last arrival phase) empty phases. That is
// always enough for a size-B buffer (and the GR1 shadow) to drain, so gains
// can be read off after the returned schedule ends. Pure suffix extension:
// no pre-existing decision slot moves.
inline Instance append_drain(const Instance& in, int buffer_capacity) {
  Instance out = in;
  const int last = last_arrival_phase(in);
  if (last < 0) throw std::invalid_argument("append_drain: instance has no arrivals");
  out.phases.resize(static_cast<std::size_t>(last + 1));
  const int extra = buffer_capacity + last;
  out.phases.insert(out.phases.end(), static_cast<std::size_t>(extra), {});
  return out;
}

// Per-frame arrival phases: result[frame-1][j-1] = arrival phase, or -1 when
// the packet is missing. Duplicate (frame, j) entries keep the first phase;
// validate_structure reports them.
inline std::vector<std::vector<int>> frame_arrival_phases(const Instance& in) {
  std::vector<std::vector<int>> arr(static_cast<std::size_t>(std::max(in.n_frames, 0)),
                                    std::vector<int>(static_cast<std::size_t>(std::max(in.k, 0)), -1));
  for (std::size_t t = 0; t < in.phases.size(); ++t) {
    for (const PacketId& p : in.phases[t]) {
      if (p.frame < 1 || p.frame > in.n_frames || p.j < 1 || p.j > in.k) continue;
      int& slot = arr[static_cast<std::size_t>(p.frame - 1)][static_cast<std::size_t>(p.j - 1)];
      if (slot < 0) slot = static_cast<int>(t);
    }
  }
  return arr;
}

// Structural well-formedness, reported exhaustively: every (frame, j) exactly
// once, indices in range, within-frame phases non-decreasing in j, at least
// one arrival. Distinct from order-respecting validation.
inline std::vector<std::string> validate_structure(const Instance& in) {
  std::vector<std::string> errors;
  if (in.k < 1) errors.push_back("k must be >= 1");
  if (in.n_frames < 1) errors.push_back("n_frames must be >= 1");
  if (in.k < 1 || in.n_frames < 1) return errors;

  std::vector<std::vector<int>> count(static_cast<std::size_t>(in.n_frames),
                                      std::vector<int>(static_cast<std::size_t>(in.k), 0));
  int total = 0;
  for (std::size_t t = 0; t < in.phases.size(); ++t) {
    for (const PacketId& p : in.phases[t]) {
      ++total;
      if (p.frame < 1 || p.frame > in.n_frames) {
        errors.push_back("phase " + std::to_string(t) + ": frame " + std::to_string(p.frame) +
                         " out of range [1," + std::to_string(in.n_frames) + "]");
        continue;
      }
      if (p.j < 1 || p.j > in.k) {
        errors.push_back("phase " + std::to_string(t) + ": packet index " + std::to_string(p.j) +
                         " of frame " + std::to_string(p.frame) + " out of range [1," +
                         std::to_string(in.k) + "]");
        continue;
      }
      ++count[static_cast<std::size_t>(p.frame - 1)][static_cast<std::size_t>(p.j - 1)];
    }
  }
  if (total == 0) errors.push_back("no packet arrives");

  const auto arr = frame_arrival_phases(in);
  for (int f = 1; f <= in.n_frames; ++f) {
    for (int j = 1; j <= in.k; ++j) {
      const int c = count[static_cast<std::size_t>(f - 1)][static_cast<std::size_t>(j - 1)];
      if (c == 0) {
        errors.push_back("frame " + std::to_string(f) + ": packet " + std::to_string(j) +
                         " never arrives");
      } else if (c > 1) {
        errors.push_back("frame " + std::to_string(f) + ": packet " + std::to_string(j) +
                         " arrives " + std::to_string(c) + " times");
      }
    }
    for (int j = 2; j <= in.k; ++j) {
      const int a = arr[static_cast<std::size_t>(f - 1)][static_cast<std::size_t>(j - 2)];
      const int b = arr[static_cast<std::size_t>(f - 1)][static_cast<std::size_t>(j - 1)];
      if (a >= 0 && b >= 0 && b < a) {
        errors.push_back("frame " + std::to_string(f) + ": packet " + std::to_string(j) +
                         " arrives at phase " + std::to_string(b) + " before packet " +
                         std::to_string(j - 1) + " at phase " + std::to_string(a));
      }
    }
  }
  return errors;
}

// A crossing between two frames: frame_a's j_a-packet arrives strictly before
// frame_b's, while its j_b-packet arrives strictly after. Equal arrival
// phases are compatible with either direction and never violate.
struct OrderViolation {
  int frame_a = 0;
  int frame_b = 0;
  int j_a = 0;
  int j_b = 0;

  friend bool operator==(const OrderViolation&, const OrderViolation&) = default;
};

// Returns every frame pair whose relative arrival order flips between two
// packet indices (one witness index pair per frame pair); empty result means
// the input is order-respecting. Precondition: structurally valid instance.
inline std::vector<OrderViolation> validate_order_respecting(const Instance& in) {
  std::vector<OrderViolation> out;
  const auto arr = frame_arrival_phases(in);
  const int n = in.n_frames;
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      int before = 0, after = 0;  // first j where a strictly precedes / follows b
      for (int j = 1; j <= in.k; ++j) {
        const int pa = arr[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(j - 1)];
        const int pb = arr[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(j - 1)];
        if (pa < pb && before == 0) before = j;
        if (pa > pb && after == 0) after = j;
      }
      if (before != 0 && after != 0) {
        out.push_back(OrderViolation{a, b, before, after});
      }
    }
  }
  return out;
}

// FIFO packet buffer. Transmission removes only the head, acceptance appends
// only at the tail, preemption removes an interior element and keeps the
// relative order of the rest.
class FifoQueue {
 public:
  explicit FifoQueue(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("buffer capacity must be >= 1");
  }

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(contents_.size()); }
  bool empty() const { return contents_.empty(); }
  bool full() const { return size() >= capacity_; }
  const std::vector<PacketId>& contents() const { return contents_; }

  void push_back(PacketId p) {
    if (full()) throw InternalError("FifoQueue: push into full buffer");
    contents_.push_back(p);
  }

  PacketId pop_front() {
    if (empty()) throw InternalError("FifoQueue: pop from empty buffer");
    PacketId p = contents_.front();
    contents_.erase(contents_.begin());
    return p;
  }

  bool erase(PacketId p) {
    auto it = std::find(contents_.begin(), contents_.end(), p);
    if (it == contents_.end()) return false;
    contents_.erase(it);
    return true;
  }

  bool contains(PacketId p) const {
    return std::find(contents_.begin(), contents_.end(), p) != contents_.end();
  }

  int count_index(int j) const {
    int c = 0;
    for (const PacketId& p : contents_) c += (p.j == j);
    return c;
  }

  // n-th buffered j-packet from the head, 1-based: the packet q with
  // position n among same-index packets.
  PacketId nth_of_index(int j, int n) const {
    int seen = 0;
    for (const PacketId& p : contents_) {
      if (p.j == j && ++seen == n) return p;
    }
    throw InternalError("FifoQueue: fewer than " + std::to_string(n) + " packets with index " +
                        std::to_string(j));
  }

  std::vector<PacketId> packets_of_frame(int frame) const {
    std::vector<PacketId> out;
    for (const PacketId& p : contents_) {
      if (p.frame == frame) out.push_back(p);
    }
    return out;
  }

 private:
  std::vector<PacketId> contents_;
  int capacity_;
};

}  // namespace koftm

#endif  // KOFTM_MODEL_HPP
