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

#ifndef KOFTM_OPT_HPP
#define KOFTM_OPT_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "koftm/model.hpp"

namespace koftm {

// The offline optimum never preempts and never accepts a packet of a frame
// it will not complete, so it equals the largest frame subset whose combined
// arrivals fit through a size-B FIFO. Feasibility of a subset is an
// aggregate occupancy condition; per-packet ordering inside a subphase does
// not matter for unit packets.

struct FeasibilityResult {
  bool feasible = false;
  // occupancy after each phase's delivery, over the drained schedule
  std::vector<int> occupancy;
  int violation_phase = -1;

  explicit operator bool() const { return feasible; }
};

struct OptResult {
  int gain = 0;
  std::vector<int> witness;            // sorted frame indices
  std::vector<int> occupancy_profile;  // certificate, per drained phase
};

// Simulates occupancy of accepting exactly the chosen frames' packets:
// per phase add the subset's arrivals, fail on overflow, then deliver one.
inline FeasibilityResult feasible(const Instance& in, const std::vector<int>& chosen, int B) {
  std::vector<char> pick(static_cast<std::size_t>(in.n_frames + 1), 0);
  for (int f : chosen) {
    if (f < 1 || f > in.n_frames)
      throw std::invalid_argument("feasible: frame " + std::to_string(f) + " out of range");
    pick[static_cast<std::size_t>(f)] = 1;
  }
  const Instance drained = append_drain(in, B);
  FeasibilityResult res;
  res.occupancy.reserve(drained.phases.size());
  int occ = 0;
  for (std::size_t t = 0; t < drained.phases.size(); ++t) {
    for (const PacketId& p : drained.phases[t]) {
      occ += pick[static_cast<std::size_t>(p.frame)];
    }
    if (occ > B) {
      res.violation_phase = static_cast<int>(t);
      return res;
    }
    if (occ > 0) --occ;
    res.occupancy.push_back(occ);
  }
  res.feasible = true;
  return res;
}

namespace detail {

// (phase, packet count) pairs, ascending by phase
using ArrivalProfile = std::vector<std::pair<int, int>>;

inline std::vector<ArrivalProfile> frame_profiles(const Instance& in) {
  std::vector<ArrivalProfile> prof(static_cast<std::size_t>(in.n_frames + 1));
  for (std::size_t t = 0; t < in.phases.size(); ++t) {
    for (const PacketId& p : in.phases[t]) {
      auto& fp = prof[static_cast<std::size_t>(p.frame)];
      if (!fp.empty() && fp.back().first == static_cast<int>(t)) {
        ++fp.back().second;
      } else {
        fp.emplace_back(static_cast<int>(t), 1);
      }
    }
  }
  return prof;
}

// Feasibility over merged (phase, count) events without walking empty
// phases: between arrival phases the queue drains one packet per phase.
inline bool profile_feasible(ArrivalProfile& events, int B) {
  std::sort(events.begin(), events.end());
  int occ = 0;
  int prev = -1;
  std::size_t i = 0;
  while (i < events.size()) {
    const int t = events[i].first;
    int count = 0;
    for (; i < events.size() && events[i].first == t; ++i) count += events[i].second;
    if (prev >= 0) occ = std::max(occ - (t - prev - 1), 0);
    occ += count;
    if (occ > B) return false;
    if (occ > 0) --occ;
    prev = t;
  }
  return true;
}

}  // namespace detail

// Exhaustive optimum: maximizes subset size over all 2^n frame subsets,
// breaking ties toward the lexicographically smallest witness. Refuses
// instances past max_frames; use opt_branch_bound for larger ones.
inline OptResult opt_bruteforce(const Instance& in, int B, int max_frames = 22) {
  const int n = in.n_frames;
  if (n > max_frames) {
    throw std::invalid_argument("opt_bruteforce: " + std::to_string(n) + " frames exceeds limit " +
                                std::to_string(max_frames) + "; use opt_branch_bound");
  }
  const auto prof = detail::frame_profiles(in);

  int best_count = 0;
  std::vector<int> best;  // empty set is always feasible
  detail::ArrivalProfile events;
  std::vector<int> witness;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    const int count = std::popcount(mask);
    if (count < best_count) continue;
    events.clear();
    witness.clear();
    for (int f = 1; f <= n; ++f) {
      if (mask & (std::uint64_t{1} << (f - 1))) {
        const auto& fp = prof[static_cast<std::size_t>(f)];
        events.insert(events.end(), fp.begin(), fp.end());
        witness.push_back(f);
      }
    }
    if (!detail::profile_feasible(events, B)) continue;
    if (count > best_count ||
        (count == best_count &&
         std::lexicographical_compare(witness.begin(), witness.end(), best.begin(), best.end()))) {
      best_count = count;
      best = witness;
    }
  }

  OptResult res;
  res.gain = best_count;
  res.witness = std::move(best);
  res.occupancy_profile = feasible(in, res.witness, B).occupancy;
  return res;
}

namespace detail {

struct FrameClass {
  std::vector<int> frames;  // ascending original indices, interchangeable profiles
  ArrivalProfile profile;   // one frame's arrivals
  int size() const { return static_cast<int>(frames.size()); }
};

// Depth-first search over per-class pick counts. Frames with identical
// arrival profiles are interchangeable, so within a class only the chosen
// count matters and the lowest-indexed frames can be taken. Bounds: chosen
// sets stay feasible at all times (feasibility is downward closed), and a
// per-index relaxation caps the remainder: for each packet index j, a frame
// picked from the remainder consumes one unit of the residual capacity
// B - (already chosen arrivals) at its j-packet's phase.
class BranchBound {
 public:
  BranchBound(const Instance& in, int B) : b_(B), n_(in.n_frames) {
    const auto prof = frame_profiles(in);
    std::vector<int> order(static_cast<std::size_t>(n_));
    std::iota(order.begin(), order.end(), 1);
    std::sort(order.begin(), order.end(), [&prof](int a, int b) {
      const auto& pa = prof[static_cast<std::size_t>(a)];
      const auto& pb = prof[static_cast<std::size_t>(b)];
      if (pa.front().first != pb.front().first) return pa.front().first < pb.front().first;
      return a < b;
    });
    for (int f : order) {
      const auto& fp = prof[static_cast<std::size_t>(f)];
      if (!classes_.empty() && classes_.back().profile == fp) {
        classes_.back().frames.push_back(f);
      } else {
        classes_.push_back(FrameClass{{f}, fp});
      }
    }
    for (auto& c : classes_) std::sort(c.frames.begin(), c.frames.end());

    int horizon = 0;
    for (const auto& c : classes_) horizon = std::max(horizon, c.profile.back().first + 1);
    arrivals_.assign(static_cast<std::size_t>(horizon), 0);

    index_events_.assign(static_cast<std::size_t>(std::max(in.k, 1)), {});
    for (std::size_t ci = 0; ci < classes_.size(); ++ci) {
      // within a frame packets are phase-sorted, so the j-th profile slot
      // (expanded by count) is the j-packet's phase
      std::size_t j = 0;
      for (const auto& [phase, count] : classes_[ci].profile) {
        for (int r = 0; r < count; ++r, ++j) {
          if (j >= index_events_.size()) index_events_.resize(j + 1);
          index_events_[j].push_back(Event{phase, static_cast<int>(ci), classes_[ci].size()});
        }
      }
    }
    for (auto& ev : index_events_) {
      std::sort(ev.begin(), ev.end(),
                [](const Event& a, const Event& b) { return a.phase < b.phase; });
    }
    counts_.assign(classes_.size(), 0);
    best_counts_ = counts_;
  }

  OptResult solve() {
    dfs(0, 0, static_cast<int>(std::accumulate(
                  classes_.begin(), classes_.end(), 0,
                  [](int acc, const FrameClass& c) { return acc + c.size(); })));
    OptResult res;
    res.gain = best_gain_;
    for (std::size_t ci = 0; ci < classes_.size(); ++ci) {
      for (int r = 0; r < best_counts_[ci]; ++r) {
        res.witness.push_back(classes_[ci].frames[static_cast<std::size_t>(r)]);
      }
    }
    std::sort(res.witness.begin(), res.witness.end());
    return res;
  }

 private:
  struct Event {
    int phase;
    int class_index;
    int frame_count;
  };

  void dfs(std::size_t ci, int chosen, int remaining) {
    if (ci == classes_.size()) {
      if (chosen > best_gain_) {
        best_gain_ = chosen;
        best_counts_ = counts_;
      }
      return;
    }
    if (chosen + upper_bound(ci, remaining) <= best_gain_) return;

    const FrameClass& cls = classes_[ci];
    const int c_max = max_additional(cls);
    apply(cls.profile, c_max);
    for (int c = c_max; c >= 0; --c) {
      counts_[ci] = c;
      dfs(ci + 1, chosen + c, remaining - cls.size());
      if (c > 0) apply(cls.profile, -1);
    }
    counts_[ci] = 0;
  }

  // Largest count of this class that keeps the chosen arrivals feasible.
  int max_additional(const FrameClass& cls) {
    int c = 0;
    while (c < cls.size()) {
      apply(cls.profile, 1);
      if (!sweep_feasible()) {
        apply(cls.profile, -1);
        break;
      }
      ++c;
    }
    if (c > 0) apply(cls.profile, -c);
    return c;
  }

  void apply(const ArrivalProfile& profile, int mult) {
    for (const auto& [phase, count] : profile) {
      arrivals_[static_cast<std::size_t>(phase)] += mult * count;
    }
  }

  bool sweep_feasible() const {
    int occ = 0;
    for (int a : arrivals_) {
      occ += a;
      if (occ > b_) return false;
      if (occ > 0) --occ;
    }
    return true;
  }

  int upper_bound(std::size_t ci, int remaining) const {
    int bound = remaining;
    for (const auto& ev : index_events_) {
      int total = 0;
      std::size_t i = 0;
      while (i < ev.size()) {
        const int phase = ev[i].phase;
        int frames_here = 0;
        for (; i < ev.size() && ev[i].phase == phase; ++i) {
          if (ev[i].class_index >= static_cast<int>(ci)) frames_here += ev[i].frame_count;
        }
        if (frames_here == 0) continue;
        const int cap = b_ - arrivals_[static_cast<std::size_t>(phase)];
        total += std::min(frames_here, std::max(cap, 0));
      }
      bound = std::min(bound, total);
    }
    return bound;
  }

  int b_;
  int n_;
  std::vector<FrameClass> classes_;
  std::vector<int> arrivals_;
  std::vector<std::vector<Event>> index_events_;  // per packet index j
  std::vector<int> counts_;
  std::vector<int> best_counts_;
  int best_gain_ = 0;
};

}  // namespace detail

// Exact optimum by branch and bound; same gain contract as opt_bruteforce
// (the witness may differ but is feasible and of equal size). Practical for
// the structured adversarial families up to a few hundred frames.
inline OptResult opt_branch_bound(const Instance& in, int B) {
  detail::BranchBound bnb(in, B);
  OptResult res = bnb.solve();
  res.occupancy_profile = feasible(in, res.witness, B).occupancy;
  return res;
}

}  // namespace koftm

#endif  // KOFTM_OPT_HPP
