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

#ifndef KOFTM_SIMULATE_HPP
#define KOFTM_SIMULATE_HPP

#include <string>
#include <vector>

#include "koftm/model.hpp"
#include "koftm/policy.hpp"
#include "koftm/trace.hpp"

namespace koftm {

struct SimResult {
  std::vector<int> completed;  // sorted frame indices with all k packets transmitted
  int gain = 0;
  Trace trace;
};

struct RunOptions {
  bool sp_skip_invalid = false;
  // Fault-injection hook: replaces MF's per-index cap (0 = keep floor(B/k)).
  int mf_cap_override = 0;
  // Adversary construction feeds structurally incomplete prefixes.
  bool validate = true;
};

namespace detail {

class CompletionTally {
 public:
  explicit CompletionTally(int n_frames)
      : transmitted_(static_cast<std::size_t>(n_frames + 1), 0) {}

  void on_transmit(PacketId p) { ++transmitted_[static_cast<std::size_t>(p.frame)]; }

  std::vector<int> completed(int k) const {
    std::vector<int> out;
    for (std::size_t f = 1; f < transmitted_.size(); ++f) {
      if (transmitted_[f] == k) out.push_back(static_cast<int>(f));
    }
    return out;
  }

 private:
  std::vector<int> transmitted_;
};

inline SimResult run_mf(const Instance& drained, int B, const RunOptions& opts) {
  MfPolicy mf(drained.k, B, drained.n_frames, opts.mf_cap_override);
  SimResult result;
  CompletionTally tally(drained.n_frames);

  for (int t = 0; t < static_cast<int>(drained.phases.size()); ++t) {
    const auto& arrivals = drained.phases[static_cast<std::size_t>(t)];
    int seq = 0;
    int max_j = 0;
    for (const PacketId& p : arrivals) max_j = std::max(max_j, p.j);
    // Index levels are processed in ascending order, so block numbers of
    // same-subphase 1-packets exist before any higher-index sibling sorts.
    for (int level = 1; level <= max_j; ++level) {
      std::vector<PacketId> group;
      for (const PacketId& p : arrivals) {
        if (p.j == level) group.push_back(p);
      }
      if (group.empty()) continue;
      for (const PacketId& p : decision_order(group, mf)) {
        const bool gr1 = mf.gr1_step(p);
        if (p.j == 1) {
          result.trace.push_back(TraceEvent{t, seq, p, Actor::GR1,
                                            gr1 ? TraceAction::Accept : TraceAction::Reject,
                                            "", 0});
        }
        const Decision d = mf.decide(p, gr1);
        if (d.middle_drop) {
          result.trace.push_back(TraceEvent{t, seq, *d.middle_drop, Actor::MF,
                                            TraceAction::Preempt, d.case_label,
                                            mf.block_of(d.middle_drop->frame)});
        }
        for (const PacketId& q : d.corresponding) {
          result.trace.push_back(TraceEvent{t, seq, q, Actor::MF, TraceAction::Preempt,
                                            d.case_label, mf.block_of(q.frame)});
        }
        result.trace.push_back(TraceEvent{t, seq, p, Actor::MF,
                                          d.accepted ? TraceAction::Accept : TraceAction::Reject,
                                          d.case_label, mf.block_of(p.frame)});
        for (const PacketId& q : d.flushed) {
          result.trace.push_back(TraceEvent{t, seq, q, Actor::MF, TraceAction::Flush, "2.2.2.1",
                                            mf.block_of(q.frame)});
        }
        ++seq;
      }
    }
    if (auto tx = mf.deliver()) {
      result.trace.push_back(TraceEvent{t, seq, *tx, Actor::MF, TraceAction::Transmit, "",
                                        mf.block_of(tx->frame)});
      tally.on_transmit(*tx);
    }
    mf.gr1_deliver();  // shadow queue delivers every phase, untraced
  }

  result.completed = tally.completed(drained.k);
  result.gain = static_cast<int>(result.completed.size());
  return result;
}

template <typename Policy>
SimResult run_in_instance_order(const Instance& drained, Actor actor, Policy& policy) {
  SimResult result;
  CompletionTally tally(drained.n_frames);
  for (int t = 0; t < static_cast<int>(drained.phases.size()); ++t) {
    int seq = 0;
    for (const PacketId& p : drained.phases[static_cast<std::size_t>(t)]) {
      const Decision d = policy.decide(p);
      result.trace.push_back(TraceEvent{t, seq, p, actor,
                                        d.accepted ? TraceAction::Accept : TraceAction::Reject,
                                        d.case_label, 0});
      ++seq;
    }
    if (auto tx = policy.deliver()) {
      result.trace.push_back(TraceEvent{t, seq, *tx, actor, TraceAction::Transmit, "", 0});
      tally.on_transmit(*tx);
    }
  }
  result.completed = tally.completed(drained.k);
  result.gain = static_cast<int>(result.completed.size());
  return result;
}

}  // namespace detail

// Runs one policy over the whole drained schedule: per phase, every arrival
// is decided in processing order (instance order; MF reorders by index level
// and block), then the head of each nonempty queue is transmitted.
// Deterministic: identical instance, capacity and policy give an identical
// trace.
inline SimResult run_policy(const Instance& in, int B, PolicyKind kind,
                            const RunOptions& opts = {}) {
  if (B < 1) throw std::invalid_argument("buffer capacity must be >= 1");
  if (opts.validate) {
    auto errors = validate_structure(in);
    if (!errors.empty()) {
      throw std::invalid_argument("invalid instance: " + errors.front() +
                                  (errors.size() > 1 ? " (+" + std::to_string(errors.size() - 1) +
                                                           " more)"
                                                     : ""));
    }
  }
  const Instance drained = append_drain(in, B);
  switch (kind) {
    case PolicyKind::MF:
      return detail::run_mf(drained, B, opts);
    case PolicyKind::SP: {
      SpPolicy sp(drained.k, B, drained.n_frames, opts.sp_skip_invalid);
      return detail::run_in_instance_order(drained, Actor::SP, sp);
    }
    case PolicyKind::Greedy: {
      GreedyPolicy greedy(B);
      return detail::run_in_instance_order(drained, Actor::GREEDY, greedy);
    }
  }
  throw std::invalid_argument("unknown policy");
}

}  // namespace koftm

#endif  // KOFTM_SIMULATE_HPP
