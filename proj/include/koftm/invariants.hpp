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

#ifndef KOFTM_INVARIANTS_HPP
#define KOFTM_INVARIANTS_HPP

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "koftm/model.hpp"
#include "koftm/simulate.hpp"
#include "koftm/trace.hpp"

namespace koftm {

struct Violation {
  std::string check;
  std::string message;
};

namespace detail {

// Replays a trace against the instance and evaluates every runtime
// invariant on the reconstructed buffer evolution. Working from the trace
// rather than live policy state lets fault-injection tests corrupt a trace
// and watch the right checker fire.
class InvariantChecker {
 public:
  InvariantChecker(const SimResult& sim, const Instance& in, int B)
      : sim_(sim), in_(in), b_(B), cap_(B / in.k) {}

  std::vector<Violation> run() {
    for (const TraceEvent& e : sim_.trace) {
      has_mf_ |= (e.actor == Actor::MF);
      has_sp_ |= (e.actor == Actor::SP);
    }
    replay();
    if (has_mf_) {
      check_block_partition();
      check_prompt_delivery();
      check_first_block_good();
    }
    check_gain();
    return std::move(violations_);
  }

 private:
  void add(const std::string& check, const std::string& message) {
    violations_.push_back(Violation{check, message});
  }

  static std::string at(const TraceEvent& e) {
    std::ostringstream os;
    os << "phase " << e.phase << " seq " << e.seq << " (frame " << e.packet.frame << ", j "
       << e.packet.j << "): ";
    return os.str();
  }

  bool per_index_caps_apply() const { return has_mf_ || has_sp_; }

  void record_block(const TraceEvent& e) {
    if (e.actor != Actor::MF || e.block <= 0) return;
    int& slot = block_of_[e.packet.frame];
    if (slot == 0) {
      slot = e.block;
    } else if (slot != e.block) {
      add("block-consistency", at(e) + "frame carries block " + std::to_string(e.block) +
                                   " after block " + std::to_string(slot));
    }
  }

  void apply_removal(const TraceEvent& e) {
    auto it = std::find(buffer_.begin(), buffer_.end(), e.packet);
    if (it == buffer_.end()) {
      add("replay", at(e) + "removal of a packet that is not buffered");
      return;
    }
    buffer_.erase(it);
    dropped_[e.packet.frame] = true;
  }

  // checks evaluated at every non-event time (after each decision slot and
  // after each delivery)
  void steady_state_checks(int phase, int seq) {
    if (static_cast<int>(buffer_.size()) > b_) {
      add("occupancy", "phase " + std::to_string(phase) + " seq " + std::to_string(seq) + ": " +
                           std::to_string(buffer_.size()) + " buffered > B=" + std::to_string(b_));
    }
    if (per_index_caps_apply()) {
      std::map<int, int> count;
      for (const PacketId& p : buffer_) ++count[p.j];
      for (const auto& [j, c] : count) {
        if (c > cap_) {
          add("per-index-cap", "phase " + std::to_string(phase) + " seq " + std::to_string(seq) +
                                   ": " + std::to_string(c) + " buffered " + std::to_string(j) +
                                   "-packets > A=" + std::to_string(cap_));
        }
      }
    }
    if (has_mf_) {
      // queue positions ordered by non-decreasing block number, per index
      std::map<int, int> last_block;
      for (const PacketId& p : buffer_) {
        const int g = block_of_.count(p.frame) ? block_of_[p.frame] : 0;
        if (g == 0) {
          add("block-order", "phase " + std::to_string(phase) + ": buffered frame " +
                                 std::to_string(p.frame) + " has no block number");
          continue;
        }
        auto [it, fresh] = last_block.emplace(p.j, g);
        if (!fresh) {
          if (g < it->second) {
            add("block-order", "phase " + std::to_string(phase) + " seq " + std::to_string(seq) +
                                   ": " + std::to_string(p.j) + "-packet of frame " +
                                   std::to_string(p.frame) + " (block " + std::to_string(g) +
                                   ") queued behind block " + std::to_string(it->second));
          }
          it->second = std::max(it->second, g);
        }
      }
    }
  }

  void replay() {
    int max_phase = -1;
    for (const TraceEvent& e : sim_.trace) max_phase = std::max(max_phase, e.phase);
    std::vector<std::vector<const TraceEvent*>> by_phase(static_cast<std::size_t>(max_phase + 1));
    for (const TraceEvent& e : sim_.trace) {
      by_phase[static_cast<std::size_t>(e.phase)].push_back(&e);
    }

    for (int t = 0; t <= max_phase; ++t) {
      bool transmitted = false;
      int flushed_block = 0;
      const TraceEvent* last_decision = nullptr;
      auto end_decision = [&]() {
        if (!last_decision) return;
        steady_state_checks(last_decision->phase, last_decision->seq);
        if (flushed_block > 0) {
          for (const PacketId& p : buffer_) {
            if (block_of_.count(p.frame) && block_of_[p.frame] == flushed_block) {
              add("flush-completeness",
                  at(*last_decision) + "packet of frame " + std::to_string(p.frame) +
                      " with block " + std::to_string(flushed_block) + " survived the flush");
            }
          }
        }
        flushed_block = 0;
        last_decision = nullptr;
      };

      for (const TraceEvent* ep : by_phase[static_cast<std::size_t>(t)]) {
        const TraceEvent& e = *ep;
        if (last_decision && (e.action == TraceAction::Transmit || e.seq != last_decision->seq)) {
          end_decision();
        }
        record_block(e);
        switch (e.action) {
          case TraceAction::Accept:
            if (e.actor == Actor::GR1) {
              if (static_cast<int>(gr1_buffer_.size()) >= b_) {
                add("occupancy", at(e) + "shadow accept into a full buffer");
              } else {
                gr1_buffer_.push_back(e.packet);
              }
              gr1_accepts_.push_back(&e);
            } else {
              if (has_mf_ && dropped_.count(e.packet.frame)) {
                add("valid-buffering",
                    at(e) + "accepted a packet of a frame with an earlier drop");
              }
              if (static_cast<int>(buffer_.size()) >= b_) {
                add("occupancy", at(e) + "accept into a full buffer");
              } else {
                buffer_.push_back(e.packet);
              }
              accepted_[e.packet] = true;
              last_decision = &e;
            }
            break;
          case TraceAction::Reject:
            if (e.actor == Actor::GR1) {
              if (e.packet.j == 1 && static_cast<int>(gr1_buffer_.size()) < b_) {
                add("gr1-greedy", at(e) + "shadow rejected a 1-packet although it had space");
              }
            } else {
              dropped_[e.packet.frame] = true;
              last_decision = &e;
            }
            break;
          case TraceAction::Preempt:
            apply_removal(e);
            last_decision = &e;
            break;
          case TraceAction::Flush:
            apply_removal(e);
            flushed_block = e.block;
            last_decision = &e;
            break;
          case TraceAction::Transmit: {
            if (buffer_.empty() || buffer_.front() != e.packet) {
              add("replay", at(e) + "transmitted packet is not the buffer head");
              auto it = std::find(buffer_.begin(), buffer_.end(), e.packet);
              if (it != buffer_.end()) buffer_.erase(it);
            } else {
              buffer_.erase(buffer_.begin());
            }
            transmit_phase_[e.packet] = e.phase;
            ++transmit_count_[e.packet.frame];
            transmitted = true;
            steady_state_checks(e.phase, e.seq);
            break;
          }
        }
      }
      end_decision();
      if (!transmitted && !buffer_.empty()) {
        add("replay", "phase " + std::to_string(t) + ": nonempty buffer but no transmission");
      }
      if (!gr1_buffer_.empty()) gr1_buffer_.erase(gr1_buffer_.begin());
    }
    if (!buffer_.empty()) {
      add("replay", "buffer not drained at the end of the trace");
    }
  }

  // The shadow's accept stream partitions into blocks of 3B: the policy
  // accepts exactly the first A 1-packets of each block, and assigns the
  // block's number.
  void check_block_partition() {
    const int span = 3 * b_;
    for (std::size_t i = 0; i < gr1_accepts_.size(); ++i) {
      const TraceEvent& gr1 = *gr1_accepts_[i];
      const TraceEvent* mf = find_paired_mf_row(gr1);
      if (mf == nullptr) {
        add("block-partition", at(gr1) + "shadow-accepted packet has no policy decision row");
        continue;
      }
      const bool expect_accept = static_cast<int>(i) % span < cap_;
      const int expect_block = static_cast<int>(i) / span + 1;
      if ((mf->action == TraceAction::Accept) != expect_accept) {
        add("block-partition", at(*mf) + "shadow-accept #" + std::to_string(i + 1) +
                                   (expect_accept ? " should have been accepted"
                                                  : " should have been rejected"));
      }
      if (mf->block != expect_block) {
        add("block-partition", at(*mf) + "expected block " + std::to_string(expect_block) +
                                   ", recorded " + std::to_string(mf->block));
      }
    }
  }

  const TraceEvent* find_paired_mf_row(const TraceEvent& gr1) {
    for (const TraceEvent& e : sim_.trace) {
      if (e.phase == gr1.phase && e.seq == gr1.seq && e.actor == Actor::MF &&
          e.packet == gr1.packet &&
          (e.action == TraceAction::Accept || e.action == TraceAction::Reject)) {
        return &e;
      }
    }
    return nullptr;
  }

  // An accepted 1-packet leaves the buffer within B phases, so it is
  // transmitted before the shadow accepts another 2B-1 1-packets.
  void check_prompt_delivery() {
    const int z = static_cast<int>(gr1_accepts_.size());
    for (int i = 0; i < z; ++i) {
      const PacketId p = gr1_accepts_[static_cast<std::size_t>(i)]->packet;
      if (!accepted_.count(p)) continue;
      auto del = transmit_phase_.find(p);
      if (del == transmit_phase_.end()) {
        add("prompt-delivery", "accepted 1-packet of frame " + std::to_string(p.frame) +
                                   " was never transmitted");
        continue;
      }
      const int witness = i + 2 * b_ - 1;  // 1-based index i+1 + 2B - 2
      if (witness < z) {
        const int arr = gr1_accepts_[static_cast<std::size_t>(witness)]->phase;
        if (del->second >= arr) {
          add("prompt-delivery",
              "1-packet of frame " + std::to_string(p.frame) + " transmitted at phase " +
                  std::to_string(del->second) + ", not before shadow accept #" +
                  std::to_string(witness + 1) + " at phase " + std::to_string(arr));
        }
      }
    }
  }

  // Block number 1 stays good: when more than one block exists, at least
  // floor(A/2) frames of block 1 complete.
  void check_first_block_good() {
    const int z = static_cast<int>(gr1_accepts_.size());
    if (z == 0) return;
    const int blocks = (z + 3 * b_ - 1) / (3 * b_);
    if (blocks < 2) return;
    int completed_first = 0;
    for (const auto& [frame, count] : transmit_count_) {
      if (count == in_.k && block_of_.count(frame) && block_of_[frame] == 1) ++completed_first;
    }
    if (completed_first < cap_ / 2) {
      add("first-block-good", "only " + std::to_string(completed_first) +
                                  " completed frames in block 1, need " + std::to_string(cap_ / 2));
    }
  }

  void check_gain() {
    std::vector<int> completed;
    for (const auto& [frame, count] : transmit_count_) {
      if (count == in_.k) completed.push_back(frame);
    }
    std::sort(completed.begin(), completed.end());
    if (completed != sim_.completed || sim_.gain != static_cast<int>(completed.size())) {
      add("gain", "reported gain " + std::to_string(sim_.gain) + " does not match " +
                      std::to_string(completed.size()) + " frames completed in the trace");
    }
    for (int f : completed) {
      if (dropped_.count(f)) {
        add("gain", "frame " + std::to_string(f) + " completed despite a dropped packet");
      }
    }
    // with the drain appended, every still-valid frame must have completed
    for (int f = 1; f <= in_.n_frames; ++f) {
      if (dropped_.count(f)) continue;
      auto it = transmit_count_.find(f);
      if (it == transmit_count_.end() || it->second != in_.k) {
        add("gain", "frame " + std::to_string(f) + " is valid at the end but not completed");
      }
    }
  }

  const SimResult& sim_;
  const Instance& in_;
  int b_;
  int cap_;
  bool has_mf_ = false;
  bool has_sp_ = false;

  std::vector<PacketId> buffer_;
  std::vector<PacketId> gr1_buffer_;
  std::map<int, int> block_of_;
  std::map<int, bool> dropped_;
  std::map<PacketId, bool> accepted_;
  std::map<PacketId, int> transmit_phase_;
  std::map<int, int> transmit_count_;
  std::vector<const TraceEvent*> gr1_accepts_;
  std::vector<Violation> violations_;
};

}  // namespace detail

// Evaluates every runtime invariant against a finished run; empty means
// pass. Checks cover buffer replay and occupancy, the per-index caps, block
// ordering along the queue, the block partition of the shadow's accept
// stream, prompt delivery of accepted 1-packets, flush completeness,
// goodness of the first block, and gain accounting.
inline std::vector<Violation> check_invariants(const SimResult& sim, const Instance& in, int B) {
  detail::InvariantChecker checker(sim, in, B);
  return checker.run();
}

}  // namespace koftm

#endif  // KOFTM_INVARIANTS_HPP
