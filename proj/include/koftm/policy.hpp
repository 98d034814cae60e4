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

#ifndef KOFTM_POLICY_HPP
#define KOFTM_POLICY_HPP

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "koftm/model.hpp"

namespace koftm {

enum class PolicyKind { MF, SP, Greedy };

inline const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::MF: return "mf";
    case PolicyKind::SP: return "sp";
    case PolicyKind::Greedy: return "greedy";
  }
  return "?";
}

inline PolicyKind policy_from_string(const std::string& s) {
  if (s == "mf") return PolicyKind::MF;
  if (s == "sp") return PolicyKind::SP;
  if (s == "greedy") return PolicyKind::Greedy;
  throw std::invalid_argument("unknown policy: " + s);
}

// Outcome of one decision slot, with every buffer removal it caused.
// `middle_drop` and `corresponding` are the Case 2.2.2 removals (the victim
// and the victim frame's other buffered packets, in queue order); `flushed`
// are the Case 2.2.2.1 removals in queue order.
struct Decision {
  bool accepted = false;
  std::string case_label;
  bool gr1_accepted = false;
  std::optional<PacketId> middle_drop;
  std::vector<PacketId> corresponding;
  std::vector<PacketId> flushed;

  std::vector<PacketId> preemptions() const {
    std::vector<PacketId> out;
    if (middle_drop) out.push_back(*middle_drop);
    out.insert(out.end(), corresponding.begin(), corresponding.end());
    out.insert(out.end(), flushed.begin(), flushed.end());
    return out;
  }
};

// MIDDLE-DROP AND FLUSH. Keeps a per-index subbuffer cap of A = floor(B/k)
// inside one FIFO buffer of size B, admits 1-packets by slicing the shadow
// greedy GR1's accept stream into blocks of 3B (first A of each block taken),
// and on j-subbuffer overflow preempts the (floor(A/2)+1)-st j-packet instead
// of the newcomer. When that preemption leaves the victim's block with at
// most floor(A/2) completable frames, the whole block is flushed.
//
// Degenerate but well defined for B < k: A = 0 means every 1-packet is
// rejected at Case 1.2, so no frame ever stays valid and the buffer stays
// empty. The competitive bound is only claimed for B >= 2k.
class MfPolicy {
 public:
  // cap_override replaces A for fault-injection experiments; 0 keeps the
  // policy's own floor(B/k).
  MfPolicy(int k, int capacity, int n_frames, int cap_override = 0)
      : k_(k),
        capacity_(capacity),
        cap_(cap_override > 0 ? cap_override : capacity / k),
        buffer_(capacity),
        gr1_buffer_(capacity),
        block_of_(static_cast<std::size_t>(n_frames + 1), 0),
        invalid_(static_cast<std::size_t>(n_frames + 1), 0) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
  }

  // Shadow greedy over 1-packets only. Must be invoked for every packet, in
  // MF's processing order, right before decide().
  bool gr1_step(PacketId p) {
    if (p.j >= 2) return false;
    if (gr1_buffer_.full()) return false;
    gr1_buffer_.push_back(p);
    return true;
  }

  Decision decide(PacketId p, bool gr1_accepted) {
    Decision d;
    d.gr1_accepted = gr1_accepted;
    if (p.j == 1) {
      decide_first(p, gr1_accepted, d);
    } else {
      decide_later(p, d);
    }
    return d;
  }

  Decision step(PacketId p) { return decide(p, gr1_step(p)); }

  std::optional<PacketId> deliver() {
    if (buffer_.empty()) return std::nullopt;
    return buffer_.pop_front();
  }

  std::optional<PacketId> gr1_deliver() {
    if (gr1_buffer_.empty()) return std::nullopt;
    return gr1_buffer_.pop_front();
  }

  const FifoQueue& buffer() const { return buffer_; }
  const FifoQueue& gr1_buffer() const { return gr1_buffer_; }
  int per_index_cap() const { return cap_; }
  int counter() const { return counter_; }
  int block() const { return block_; }

  // Block number of the frame, assigned at its 1-packet's decision time;
  // 0 while unassigned.
  int block_of(int frame) const { return block_of_[static_cast<std::size_t>(frame)]; }

  // A frame is valid while MF has dropped none of its packets.
  bool is_valid(int frame) const { return !invalid_[static_cast<std::size_t>(frame)]; }

  // Number of valid frames with an assigned block number u.
  int valid_frames_in_block(int u) const {
    auto it = valid_in_block_.find(u);
    return it == valid_in_block_.end() ? 0 : it->second;
  }

 private:
  void decide_first(PacketId p, bool gr1_accepted, Decision& d) {
    auto& slot = block_of_[static_cast<std::size_t>(p.frame)];
    if (slot != 0) throw InternalError("MF: 1-packet of frame " + std::to_string(p.frame) +
                                       " decided twice");
    slot = block_;  // g(p) = Block value just before this decision
    ++valid_in_block_[block_];

    if (!gr1_accepted) {
      d.case_label = "1.1";
      invalidate(p.frame);
      return;
    }
    ++counter_;
    if (counter_ <= cap_) {
      d.case_label = "1.2.1";
      if (buffer_.full()) {
        // Guaranteed to have space while Counter <= A; a full buffer here is
        // a policy bug, not an input condition.
        throw InternalError("MF: buffer full at Case 1.2.1 (counter=" + std::to_string(counter_) +
                            ", frame=" + std::to_string(p.frame) + ")");
      }
      buffer_.push_back(p);
      d.accepted = true;
    } else if (counter_ < 3 * capacity_) {
      d.case_label = "1.2.2";
      invalidate(p.frame);
    } else {
      d.case_label = "1.2.3";
      invalidate(p.frame);
      counter_ = 0;
      ++block_;
    }
  }

  void decide_later(PacketId p, Decision& d) {
    if (block_of_[static_cast<std::size_t>(p.frame)] == 0) {
      throw InternalError("MF: " + std::to_string(p.j) + "-packet of frame " +
                          std::to_string(p.frame) + " decided before its 1-packet");
    }
    if (!is_valid(p.frame)) {
      d.case_label = "2.1";
      return;
    }
    const int buffered = buffer_.count_index(p.j);
    if (buffered <= cap_ - 1) {
      d.case_label = "2.2.1";
      buffer_.push_back(p);
      d.accepted = true;
      return;
    }

    // Case 2.2.2: middle-drop. h counts valid frames of the victim's block
    // just before this decision, so it includes the victim's own frame.
    const PacketId victim = buffer_.nth_of_index(p.j, cap_ / 2 + 1);
    const int victim_block = block_of_[static_cast<std::size_t>(victim.frame)];
    const int h = valid_frames_in_block(victim_block);

    d.case_label = "2.2.2";
    d.middle_drop = victim;
    buffer_.erase(victim);
    d.corresponding = buffer_.packets_of_frame(victim.frame);
    for (const PacketId& q : d.corresponding) buffer_.erase(q);
    invalidate(victim.frame);

    buffer_.push_back(p);
    d.accepted = true;

    if (h <= cap_ / 2) {
      // Flush: drop every buffered packet of the victim's block.
      d.flushed = packets_of_block(victim_block);
      for (const PacketId& q : d.flushed) {
        if (q == p) {
          throw InternalError("MF: flush would drop the packet just accepted (frame " +
                              std::to_string(p.frame) + ")");
        }
        buffer_.erase(q);
        invalidate(q.frame);
      }
    }
  }

  std::vector<PacketId> packets_of_block(int u) const {
    std::vector<PacketId> out;
    for (const PacketId& q : buffer_.contents()) {
      if (block_of_[static_cast<std::size_t>(q.frame)] == u) out.push_back(q);
    }
    return out;
  }

  void invalidate(int frame) {
    auto& flag = invalid_[static_cast<std::size_t>(frame)];
    if (flag) return;
    flag = 1;
    const int u = block_of_[static_cast<std::size_t>(frame)];
    if (u != 0) --valid_in_block_[u];
  }

  int k_;
  int capacity_;
  int cap_;  // per-index subbuffer size A
  FifoQueue buffer_;
  FifoQueue gr1_buffer_;
  int counter_ = 0;
  int block_ = 1;
  std::vector<int> block_of_;
  std::vector<char> invalid_;
  std::unordered_map<int, int> valid_in_block_;
};

// STATICPARTITIONING: tail-drop per virtual j-subbuffer of size A, never
// preempts. The literal policy ignores frame validity and may spend space on
// packets of frames it has already broken; skip_invalid adds the obvious
// refinement of rejecting those outright.
class SpPolicy {
 public:
  SpPolicy(int k, int capacity, int n_frames, bool skip_invalid = false)
      : cap_(capacity / k),
        buffer_(capacity),
        skip_invalid_(skip_invalid),
        broken_(static_cast<std::size_t>(n_frames + 1), 0) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
  }

  Decision decide(PacketId p) {
    Decision d;
    if (skip_invalid_ && broken_[static_cast<std::size_t>(p.frame)]) {
      return d;
    }
    if (buffer_.count_index(p.j) < cap_) {
      buffer_.push_back(p);
      d.accepted = true;
    } else {
      broken_[static_cast<std::size_t>(p.frame)] = 1;
    }
    return d;
  }

  std::optional<PacketId> deliver() {
    if (buffer_.empty()) return std::nullopt;
    return buffer_.pop_front();
  }

  const FifoQueue& buffer() const { return buffer_; }
  int per_index_cap() const { return cap_; }

 private:
  int cap_;
  FifoQueue buffer_;
  bool skip_invalid_;
  std::vector<char> broken_;
};

// Non-preemptive greedy baseline: accept whenever the buffer has room.
class GreedyPolicy {
 public:
  explicit GreedyPolicy(int capacity) : buffer_(capacity) {}

  Decision decide(PacketId p) {
    Decision d;
    if (!buffer_.full()) {
      buffer_.push_back(p);
      d.accepted = true;
    }
    return d;
  }

  std::optional<PacketId> deliver() {
    if (buffer_.empty()) return std::nullopt;
    return buffer_.pop_front();
  }

  const FifoQueue& buffer() const { return buffer_; }

 private:
  FifoQueue buffer_;
};

// MF's same-subphase processing order: packets with a smaller within-frame
// index first, then smaller block number, remaining ties in instance order.
// 1-packets have no block number yet and keep instance order among
// themselves. Block numbers of higher-index packets must already be assigned
// (their 1-packets arrive no later, and equal-phase 1-packets sort into an
// earlier index level).
inline std::vector<PacketId> decision_order(const std::vector<PacketId>& arrivals,
                                            const MfPolicy& state) {
  std::vector<PacketId> out;
  out.reserve(arrivals.size());
  int max_j = 0;
  for (const PacketId& p : arrivals) max_j = std::max(max_j, p.j);
  for (int level = 1; level <= max_j; ++level) {
    std::vector<PacketId> group;
    for (const PacketId& p : arrivals) {
      if (p.j == level) group.push_back(p);
    }
    if (level >= 2) {
      for (const PacketId& p : group) {
        if (state.block_of(p.frame) == 0) {
          throw InternalError("decision_order: frame " + std::to_string(p.frame) +
                              " has no block number at a " + std::to_string(level) +
                              "-packet decision");
        }
      }
      std::stable_sort(group.begin(), group.end(), [&state](const PacketId& a, const PacketId& b) {
        return state.block_of(a.frame) < state.block_of(b.frame);
      });
    }
    out.insert(out.end(), group.begin(), group.end());
  }
  return out;
}

}  // namespace koftm

#endif  // KOFTM_POLICY_HPP
