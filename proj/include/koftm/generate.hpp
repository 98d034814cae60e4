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

#ifndef KOFTM_GENERATE_HPP
#define KOFTM_GENERATE_HPP

#include <cctype>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "koftm/model.hpp"
#include "koftm/policy.hpp"
#include "koftm/simulate.hpp"
#include "koftm/trace.hpp"

namespace koftm {

// A named quantitative statement about a generated case: relation is one of
// "==", "<=", ">=", value compares against the simulated gain of the named
// quantity ("V_MF", "V_SP", "V_OPT", ...).
struct Claim {
  std::string name;
  std::string relation;
  long long value = 0;
  std::string note;
};

struct GeneratedCase {
  Instance instance;
  int B = 0;
  std::vector<int> opt_witness;  // claimed-feasible frame subset
  std::vector<Claim> claims;
  Trace golden_trace;  // nonempty only for the execution-example case
};

namespace detail {

inline void add_arrival(Instance& in, int phase, int frame, int j) {
  if (phase >= static_cast<int>(in.phases.size())) in.phases.resize(static_cast<std::size_t>(phase + 1));
  in.phases[static_cast<std::size_t>(phase)].push_back(PacketId{frame, j});
}

inline std::string claim_name(PolicyKind alg) {
  std::string n = policy_name(alg);
  for (char& c : n) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return "V_" + n;
}

// Frames whose 1-packets the policy accepted at the given phase.
inline std::set<int> accepted_first_packets(const Trace& trace, int phase) {
  std::set<int> out;
  for (const TraceEvent& e : trace) {
    if (e.phase == phase && e.actor != Actor::GR1 && e.action == TraceAction::Accept &&
        e.packet.j == 1) {
      out.insert(e.packet.frame);
    }
  }
  return out;
}

// First `want` frames of [lo, hi] not contained in `taken`.
inline std::vector<int> lowest_not_in(int lo, int hi, const std::set<int>& taken, int want) {
  std::vector<int> out;
  for (int f = lo; f <= hi && static_cast<int>(out.size()) < want; ++f) {
    if (!taken.count(f)) out.push_back(f);
  }
  if (static_cast<int>(out.size()) < want) {
    throw InternalError("adaptive adversary: burst [" + std::to_string(lo) + "," +
                        std::to_string(hi) + "] has fewer than " + std::to_string(want) +
                        " packets the driven policy rejected");
  }
  return out;
}

}  // namespace detail

// Adaptive lower-bound schedule against a deterministic policy. Three
// 1-packet bursts (sizes 2B, B+X, 2B with X = floor(B/(k-1))) separated by
// B-1 silent phases; the adversary simulates the policy on each prefix and
// earmarks rejected frames for the optimum: D and H (B frames each) get
// their remaining packets in per-index bursts the optimum can stream, while
// every other frame's remaining packets collide in one subphase at (k+2)B,
// capping the policy at X completions. The F set (X frames of the middle
// burst) fits through that collision phase, so the optimum completes
// 2B + X frames.
//
// Frames the policy accepted and frames it rejected beyond the earmarked
// sets share the collision subphase; that keeps every frame at exactly k
// packets without disturbing either bound.
inline GeneratedCase gen_det_lower_bound(int k, int B, PolicyKind alg,
                                         const RunOptions& run_opts = {}) {
  if (k < 2) throw std::invalid_argument("gen_det_lower_bound: k must be >= 2");
  if (B < 1) throw std::invalid_argument("gen_det_lower_bound: B must be >= 1");
  const int X = B / (k - 1);
  const int n_frames = 5 * B + X;

  GeneratedCase out;
  out.B = B;
  Instance& in = out.instance;
  in.k = k;
  in.n_frames = n_frames;
  in.name = "det-lb-k" + std::to_string(k) + "-B" + std::to_string(B) + "-" + policy_name(alg);

  RunOptions prefix_opts = run_opts;
  prefix_opts.validate = false;

  // burst of 1-packets [lo..hi] at `phase`, then simulate the prefix and
  // earmark `want` of the frames the policy did not accept
  auto burst_and_pick = [&](int phase, int lo, int hi, int want) {
    for (int f = lo; f <= hi; ++f) detail::add_arrival(in, phase, f, 1);
    const SimResult sim = run_policy(in, B, alg, prefix_opts);
    return detail::lowest_not_in(lo, hi, detail::accepted_first_packets(sim.trace, phase), want);
  };

  const std::vector<int> d_set = burst_and_pick(0, 1, 2 * B, B);
  const std::vector<int> f_set = burst_and_pick(B, 2 * B + 1, 3 * B + X, X);
  const std::vector<int> h_set = burst_and_pick(2 * B, 3 * B + X + 1, 5 * B + X, B);

  std::set<int> streamed(d_set.begin(), d_set.end());
  streamed.insert(h_set.begin(), h_set.end());

  for (int j = 2; j <= k; ++j) {
    for (int f : d_set) detail::add_arrival(in, (j + 1) * B, f, j);
  }
  for (int j = 2; j <= k; ++j) {
    for (int f = 1; f <= n_frames; ++f) {
      if (!streamed.count(f)) detail::add_arrival(in, (k + 2) * B, f, j);
    }
  }
  for (int j = 2; j <= k; ++j) {
    for (int f : h_set) detail::add_arrival(in, (k + 2 + (j - 1)) * B, f, j);
  }

  out.opt_witness = d_set;
  out.opt_witness.insert(out.opt_witness.end(), f_set.begin(), f_set.end());
  out.opt_witness.insert(out.opt_witness.end(), h_set.begin(), h_set.end());
  std::sort(out.opt_witness.begin(), out.opt_witness.end());

  in.meta = {{"family", "det-lb"},
             {"k", k},
             {"B", B},
             {"X", X},
             {"alg", policy_name(alg)},
             {"tail_spacing", "per-index bursts of B packets, B phases apart"}};
  out.claims.push_back(Claim{"V_OPT", "==", 2LL * B + X, "certified by witness feasibility"});
  out.claims.push_back(
      Claim{detail::claim_name(alg), "<=", X, "single collision subphase caps completions"});
  return out;
}

namespace detail {

// Frame ids of subgroup (i, jj), 1-based, B frames each.
inline int rand_lb_frame(int B, int y, int group, int subgroup, int offset) {
  return (group - 1) * y * B + (subgroup - 1) * B + offset;
}

// One round of the x-packets of group i: y subrounds of B packets, each
// followed by B-1 silent phases.
inline void rand_lb_round(Instance& in, int B, int y, int group, int x, int start) {
  for (int jj = 1; jj <= y; ++jj) {
    const int phase = start + (jj - 1) * B;
    for (int o = 1; o <= B; ++o) {
      add_arrival(in, phase, rand_lb_frame(B, y, group, jj, o), x);
    }
  }
}

// The z-independent prefix: every round with i + x <= k, i.e. all arrivals
// at phases below (k-1)yB. Packet indices above the measured ones have not
// arrived yet, so the instance is structurally partial by design.
inline Instance rand_lb_prefix(int k, int B, int y) {
  Instance in;
  in.k = k;
  in.n_frames = (k - 1) * y * B;
  in.name = "rand-lb-prefix";
  for (int i = 1; i <= k - 1; ++i) {
    for (int x = 1; x <= k - 1; ++x) {
      if (i + x <= k) rand_lb_round(in, B, y, i, x, (i + x - 2) * y * B);
    }
  }
  return in;
}

}  // namespace detail

// Selects the group whose measured packets the policy accepts least. During
// the k-1 simultaneous rounds starting at phase (k-2)yB, group i exposes its
// (k-i)-packets; the buffer admits at most B per subround across all groups,
// so the minimum count is at most yB/(k-1). The prefix is identical for
// every z, which is what makes the full construction oblivious.
inline int choose_z(int k, int B, int y,
                    const std::function<SimResult(const Instance&, int)>& simulate,
                    int trials = 1) {
  if (k < 3) throw std::invalid_argument("choose_z: k must be >= 3");
  if (trials < 1) throw std::invalid_argument("choose_z: trials must be >= 1");
  const Instance prefix = detail::rand_lb_prefix(k, B, y);

  std::vector<long long> total(static_cast<std::size_t>(k), 0);
  for (int trial = 0; trial < trials; ++trial) {
    const SimResult sim = simulate(prefix, B);
    for (const TraceEvent& e : sim.trace) {
      if (e.actor == Actor::GR1 || e.action != TraceAction::Accept) continue;
      const int i = (e.packet.frame - 1) / (y * B) + 1;
      if (e.packet.j == k - i) total[static_cast<std::size_t>(i)] += 1;
    }
  }
  int z = 1;
  for (int i = 2; i <= k - 1; ++i) {
    if (total[static_cast<std::size_t>(i)] < total[static_cast<std::size_t>(z)]) z = i;
  }
  return z;
}

inline int choose_z(int k, int B, int y, PolicyKind alg, int trials = 1) {
  RunOptions opts;
  opts.validate = false;
  return choose_z(
      k, B, y, [alg, &opts](const Instance& in, int cap) { return run_policy(in, cap, alg, opts); },
      trials);
}

// Oblivious lower-bound schedule: (k-1) groups of yB frames. For packet
// indices x < k every group gets a round of subrounds; k-packets of the
// favoured group z stream as a round too, while every other group's
// k-packets collide in a single burst of yB. The optimum completes all of
// group z; an online policy is held to its measured-window acceptances on z
// plus at most B frames per other group.
inline GeneratedCase gen_rand_lower_bound(int k, int B, int y, int z) {
  if (k < 3) throw std::invalid_argument("gen_rand_lower_bound: k must be >= 3");
  if (B < 1 || y < 1) throw std::invalid_argument("gen_rand_lower_bound: B and y must be >= 1");
  if (z < 1 || z > k - 1) throw std::invalid_argument("gen_rand_lower_bound: z must be in [1,k-1]");

  GeneratedCase out;
  out.B = B;
  Instance& in = out.instance;
  in.k = k;
  in.n_frames = (k - 1) * y * B;
  in.name = "rand-lb-k" + std::to_string(k) + "-B" + std::to_string(B) + "-y" + std::to_string(y) +
            "-z" + std::to_string(z);

  for (int i = 1; i <= k - 1; ++i) {
    for (int x = 1; x <= k - 1; ++x) {
      detail::rand_lb_round(in, B, y, i, x, (i + x - 2) * y * B);
    }
  }
  for (int i = 1; i <= k - 1; ++i) {
    const int start = (i + k - 2) * y * B;
    if (i == z) {
      detail::rand_lb_round(in, B, y, i, k, start);
    } else {
      for (int jj = 1; jj <= y; ++jj) {
        for (int o = 1; o <= B; ++o) {
          detail::add_arrival(in, start, detail::rand_lb_frame(B, y, i, jj, o), k);
        }
      }
    }
  }

  for (int jj = 1; jj <= y; ++jj) {
    for (int o = 1; o <= B; ++o) out.opt_witness.push_back(detail::rand_lb_frame(B, y, z, jj, o));
  }
  std::sort(out.opt_witness.begin(), out.opt_witness.end());

  in.meta = {{"family", "rand-lb"}, {"k", k}, {"B", B}, {"y", y}, {"z", z}};
  out.claims.push_back(
      Claim{"V_OPT", ">=", static_cast<long long>(y) * B, "witness streams group z"});
  return out;
}

// Same construction with z selected for the given policy; attaches the
// resulting gain bound as a claim.
inline GeneratedCase gen_rand_lower_bound(int k, int B, int y, PolicyKind alg, int trials = 1) {
  const int z = choose_z(k, B, y, alg, trials);
  GeneratedCase out = gen_rand_lower_bound(k, B, y, z);
  out.claims.push_back(Claim{detail::claim_name(alg), "<=",
                             static_cast<long long>(y) * B / (k - 1) +
                                 static_cast<long long>(k - 2) * B,
                             "z minimises the measured-window acceptances"});
  return out;
}

// Bursty schedule on which tail-drop static partitioning completes only A
// frames while the optimum completes (k-1)B. 1-packets stream in N bursts
// of B; for every higher index the bursts double in width, so SP's
// j-subbuffer keeps admitting leading frames whose later packets it will
// drop again.
inline GeneratedCase gen_sp_killer(int k, int B) {
  if (k < 2 || k > 16) throw std::invalid_argument("gen_sp_killer: k must be in [2,16]");
  if (B < k) throw std::invalid_argument("gen_sp_killer: B must be >= k");
  const int A = B / k;
  const int D = 3 * B;
  const int N = 3 * (1 << (k - 1));
  const int n_frames = N * B;

  GeneratedCase out;
  out.B = B;
  Instance& in = out.instance;
  in.k = k;
  in.n_frames = n_frames;
  in.name = "sp-killer-k" + std::to_string(k) + "-B" + std::to_string(B);

  int t = 0;
  for (int w = 1; w <= N; ++w) {
    for (int f = (w - 1) * B + 1; f <= w * B; ++f) detail::add_arrival(in, t, f, 1);
    t += B;
  }
  for (int j = 2; j <= k; ++j) {
    t = (j - 1) * N * B;
    const int half = 1 << (j - 2);
    for (int yy = 0; yy <= (1 << (k - j)) - 1; ++yy) {
      const int base = yy * 2 * half * D;
      for (int f = base + 1; f <= base + half * D + D; ++f) detail::add_arrival(in, t, f, j);
      t += B;
      for (int x = 1; x <= half - 1; ++x) {
        for (int f = base + half * D + x * D + 1; f <= base + half * D + x * D + D; ++f) {
          detail::add_arrival(in, t, f, j);
        }
        t += B;
      }
    }
  }

  for (int z = 1; z <= k - 1; ++z) {
    int b_z = 0;
    for (int jj = 1; jj <= z - 1; ++jj) b_z += (1 << (k - jj - 1)) * D;
    for (int f = b_z + D + 1; f <= b_z + D + B; ++f) out.opt_witness.push_back(f);
  }
  std::sort(out.opt_witness.begin(), out.opt_witness.end());

  in.meta = {{"family", "sp-killer"}, {"k", k}, {"B", B}, {"A", A}, {"D", D}, {"N", N}};
  out.claims.push_back(Claim{"V_SP", "==", A, "tail-drop keeps only the leading frames"});
  out.claims.push_back(Claim{"V_OPT", "==", static_cast<long long>(k - 1) * B,
                             "certified by witness feasibility"});
  out.claims.push_back(Claim{"V_MF", ">=", static_cast<long long>(k) * (A / 2),
                             "middle-drop keeps the front half of each subbuffer"});
  return out;
}

namespace detail {

class GoldenBuilder {
 public:
  explicit GoldenBuilder(Trace& trace) : trace_(trace) {}

  void begin_phase(int phase) {
    phase_ = phase;
    seq_ = 0;
  }

  // block number of a frame in the execution example
  static int block_of(int frame) { return frame <= 48 ? 1 : (frame <= 84 ? 2 : 3); }

  void ones(int lo, int hi, bool gr1_accept, const std::string& mf_case) {
    for (int f = lo; f <= hi; ++f) {
      trace_.push_back(TraceEvent{phase_, seq_, {f, 1}, Actor::GR1,
                                  gr1_accept ? TraceAction::Accept : TraceAction::Reject, "", 0});
      trace_.push_back(TraceEvent{phase_, seq_, {f, 1}, Actor::MF,
                                  mf_case == "1.2.1" ? TraceAction::Accept : TraceAction::Reject,
                                  mf_case, block_of(f)});
      ++seq_;
    }
  }

  void laters(int j, int lo, int hi, const std::string& mf_case) {
    for (int f = lo; f <= hi; ++f) {
      trace_.push_back(TraceEvent{phase_, seq_, {f, j}, Actor::MF,
                                  mf_case == "2.2.1" ? TraceAction::Accept : TraceAction::Reject,
                                  mf_case, block_of(f)});
      ++seq_;
    }
  }

  // Case 2.2.2 decision: middle-drop victim, the victim frame's other
  // buffered packets, the acceptance, then flush removals in queue order.
  void middle(PacketId p, PacketId victim, std::vector<PacketId> corresponding = {},
              std::vector<PacketId> flushed = {}) {
    trace_.push_back(TraceEvent{phase_, seq_, victim, Actor::MF, TraceAction::Preempt, "2.2.2",
                                block_of(victim.frame)});
    for (const PacketId& q : corresponding) {
      trace_.push_back(
          TraceEvent{phase_, seq_, q, Actor::MF, TraceAction::Preempt, "2.2.2", block_of(q.frame)});
    }
    trace_.push_back(
        TraceEvent{phase_, seq_, p, Actor::MF, TraceAction::Accept, "2.2.2", block_of(p.frame)});
    for (const PacketId& q : flushed) {
      trace_.push_back(
          TraceEvent{phase_, seq_, q, Actor::MF, TraceAction::Flush, "2.2.2.1", block_of(q.frame)});
    }
    ++seq_;
  }

 private:
  Trace& trace_;
  int phase_ = 0;
  int seq_ = 0;
};

}  // namespace detail

// The execution example: k = 3, B = 12 (A = 4), 120 frames, together with
// its full expected decision list as a golden trace.
inline GeneratedCase gen_appendix_b() {
  GeneratedCase out;
  out.B = 12;
  Instance& in = out.instance;
  in.k = 3;
  in.n_frames = 120;
  in.name = "appendix-b";
  in.meta = {{"family", "appendix-b"}, {"k", 3}, {"B", 12}, {"A", 4}};

  const std::vector<std::pair<int, std::pair<int, int>>> one_bursts = {
      {0, {1, 24}},   {12, {25, 36}}, {24, {37, 48}},  {36, {49, 60}},  {48, {61, 72}},
      {60, {73, 84}}, {72, {85, 96}}, {84, {97, 108}}, {96, {109, 120}}};
  for (const auto& [phase, range] : one_bursts) {
    for (int f = range.first; f <= range.second; ++f) detail::add_arrival(in, phase, f, 1);
  }
  for (int f = 1; f <= 48; ++f) detail::add_arrival(in, 108, f, 2);
  for (int f = 49; f <= 86; ++f) detail::add_arrival(in, 120, f, 2);
  for (int f = 1; f <= 86; ++f) detail::add_arrival(in, 120, f, 3);
  for (int f = 87; f <= 120; ++f) detail::add_arrival(in, 121, f, 2);
  for (int f = 87; f <= 120; ++f) detail::add_arrival(in, 121, f, 3);

  detail::GoldenBuilder g(out.golden_trace);
  g.begin_phase(0);
  g.ones(1, 4, true, "1.2.1");
  g.ones(5, 12, true, "1.2.2");
  g.ones(13, 24, false, "1.1");
  g.begin_phase(12);
  g.ones(25, 36, true, "1.2.2");
  g.begin_phase(24);
  g.ones(37, 47, true, "1.2.2");
  g.ones(48, 48, true, "1.2.3");
  g.begin_phase(36);
  g.ones(49, 52, true, "1.2.1");
  g.ones(53, 60, true, "1.2.2");
  g.begin_phase(48);
  g.ones(61, 72, true, "1.2.2");
  g.begin_phase(60);
  g.ones(73, 83, true, "1.2.2");
  g.ones(84, 84, true, "1.2.3");
  g.begin_phase(72);
  g.ones(85, 88, true, "1.2.1");
  g.ones(89, 96, true, "1.2.2");
  g.begin_phase(84);
  g.ones(97, 108, true, "1.2.2");
  g.begin_phase(96);
  g.ones(109, 119, true, "1.2.2");
  g.ones(120, 120, true, "1.2.3");
  g.begin_phase(108);
  g.laters(2, 1, 4, "2.2.1");
  g.laters(2, 5, 48, "2.1");
  g.begin_phase(120);
  g.laters(2, 49, 52, "2.2.1");
  g.laters(2, 53, 84, "2.1");
  g.middle({85, 2}, {51, 2});
  g.middle({86, 2}, {52, 2});
  g.laters(3, 1, 4, "2.2.1");
  g.laters(3, 5, 48, "2.1");
  g.middle({49, 3}, {3, 3});
  g.middle({50, 3}, {4, 3});
  g.laters(3, 51, 84, "2.1");
  g.middle({85, 3}, {49, 3}, {{49, 2}}, {{50, 2}, {50, 3}});
  g.laters(3, 86, 86, "2.2.1");
  g.begin_phase(121);
  g.laters(2, 87, 88, "2.2.1");
  g.laters(2, 89, 120, "2.1");
  g.middle({87, 3}, {85, 3});
  g.middle({88, 3}, {86, 3}, {{86, 2}});
  g.laters(3, 89, 120, "2.1");

  out.claims.push_back(Claim{"V_MF", "==", 4, "survivors of the traced execution"});
  return out;
}

struct BurstParams {
  int tie_permille = 500;  // chance the next packet shares its lower-bound phase
  int max_gap = 3;
};

// Random order-respecting family: one non-decreasing phase sequence over the
// canonical frame order per packet index, coupled by the within-frame
// ordering constraint. Pairwise comparisons then agree with the canonical
// order for every index, ties allowed, so the output is order-respecting by
// construction. Same seed, same instance.
inline Instance gen_random_order_respecting(int k, int n_frames, std::uint64_t seed,
                                            const BurstParams& params = {}) {
  if (k < 1 || n_frames < 1)
    throw std::invalid_argument("gen_random_order_respecting: k and n_frames must be >= 1");
  if (params.max_gap < 1 || params.tie_permille < 0 || params.tie_permille > 1000)
    throw std::invalid_argument("gen_random_order_respecting: bad burst params");

  // raw engine draws keep the stream identical across standard libraries
  std::mt19937_64 rng(seed);
  auto gap = [&rng, &params]() -> int {
    if (static_cast<int>(rng() % 1000) < params.tie_permille) return 0;
    return 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(params.max_gap));
  };

  std::vector<std::vector<int>> phase(static_cast<std::size_t>(k),
                                      std::vector<int>(static_cast<std::size_t>(n_frames), 0));
  for (int f = 0; f < n_frames; ++f) {
    for (int j = 0; j < k; ++j) {
      int base = 0;
      if (f > 0) base = std::max(base, phase[static_cast<std::size_t>(j)][static_cast<std::size_t>(f - 1)]);
      if (j > 0) base = std::max(base, phase[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(f)]);
      phase[static_cast<std::size_t>(j)][static_cast<std::size_t>(f)] =
          (f == 0 && j == 0) ? 0 : base + gap();
    }
  }

  Instance in;
  in.k = k;
  in.n_frames = n_frames;
  in.name = "random-k" + std::to_string(k) + "-n" + std::to_string(n_frames) + "-s" +
            std::to_string(seed);
  in.meta = {{"family", "random"},
             {"k", k},
             {"seed", seed},
             {"tie_permille", params.tie_permille},
             {"max_gap", params.max_gap}};
  for (int j = 0; j < k; ++j) {
    for (int f = 0; f < n_frames; ++f) {
      detail::add_arrival(in, phase[static_cast<std::size_t>(j)][static_cast<std::size_t>(f)],
                          f + 1, j + 1);
    }
  }
  return in;
}

}  // namespace koftm

#endif  // KOFTM_GENERATE_HPP
