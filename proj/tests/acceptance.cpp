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

// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance and threshold is pinned in code; runtime budgets are part
// of the criteria and enforced.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "koftm/generate.hpp"
#include "koftm/invariants.hpp"
#include "koftm/opt.hpp"
#include "koftm/simulate.hpp"
#include "koftm/trace.hpp"

using namespace koftm;

namespace {

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<void(std::vector<std::string>&)> body;
};

long long g_invariant_violations = 0;

void expect(std::vector<std::string>& errors, bool ok, const std::string& what) {
  if (!ok) errors.push_back(what);
}

void run_checked(std::vector<std::string>& errors, const Instance& in, int B, PolicyKind kind,
                 SimResult& out) {
  out = run_policy(in, B, kind);
  const auto violations = check_invariants(out, in, B);
  g_invariant_violations += static_cast<long long>(violations.size());
  for (const auto& v : violations) {
    errors.push_back(in.name + " [" + v.check + "] " + v.message);
  }
}

void criterion_appendix_b_golden(std::vector<std::string>& errors) {
  const GeneratedCase gen = gen_appendix_b();
  expect(errors, gen.instance.k == 3 && gen.B == 12, "parameters must be k=3, B=12");
  SimResult sim;
  run_checked(errors, gen.instance, gen.B, PolicyKind::MF, sim);
  const auto diff = compare_traces(sim.trace, gen.golden_trace);
  if (!diff.empty()) {
    errors.push_back("golden trace differs in " + std::to_string(diff.size()) + " rows; first: " +
                     "expected [" + diff[0].expected + "] actual [" + diff[0].actual + "]");
  }
  expect(errors, sim.completed == std::vector<int>{1, 2, 87, 88},
         "completed set must be {1,2,87,88}");
}

void criterion_deterministic_lower_bound(std::vector<std::string>& errors) {
  for (int k : {2, 3, 4, 5}) {
    for (int B = std::max(2, k - 1); B <= 12; ++B) {
      const int X = B / (k - 1);
      const GeneratedCase gen = gen_det_lower_bound(k, B, PolicyKind::MF);
      const std::string tag = "k=" + std::to_string(k) + " B=" + std::to_string(B);
      expect(errors, validate_order_respecting(gen.instance).empty(),
             tag + ": not order-respecting");
      expect(errors, static_cast<int>(gen.opt_witness.size()) == 2 * B + X,
             tag + ": witness size != 2B+X");
      expect(errors, feasible(gen.instance, gen.opt_witness, B).feasible,
             tag + ": witness infeasible");
      SimResult sim;
      run_checked(errors, gen.instance, B, PolicyKind::MF, sim);
      expect(errors, sim.gain <= X, tag + ": V_MF > X");
      // certified ratio >= 2B/X + 1, cross-multiplied in exact integers
      if (X > 0) {
        expect(errors,
               static_cast<long long>(gen.opt_witness.size()) * X >=
                   static_cast<long long>(2 * B + X) * sim.gain,
               tag + ": ratio below 2B/X + 1");
      }
    }
  }
  // below B = k-1 the ratio is unbounded
  const GeneratedCase gen = gen_det_lower_bound(4, 2, PolicyKind::MF);
  SimResult sim;
  run_checked(errors, gen.instance, 2, PolicyKind::MF, sim);
  expect(errors, sim.gain == 0, "k=4 B=2: V_MF must be 0");
  expect(errors, gen.opt_witness.size() == 4 &&
                     feasible(gen.instance, gen.opt_witness, 2).feasible,
         "k=4 B=2: certified optimum must be positive");
}

void criterion_sp_killer(std::vector<std::string>& errors) {
  for (const auto& [k, B] : std::vector<std::pair<int, int>>{{3, 6}, {4, 8}, {5, 10}}) {
    const int A = B / k;
    const GeneratedCase gen = gen_sp_killer(k, B);
    const std::string tag = "k=" + std::to_string(k) + " B=" + std::to_string(B);
    expect(errors, validate_order_respecting(gen.instance).empty(), tag + ": not order-respecting");
    SimResult sp;
    run_checked(errors, gen.instance, B, PolicyKind::SP, sp);
    expect(errors, sp.gain == A, tag + ": V_SP = " + std::to_string(sp.gain) + ", want exactly " +
                                     std::to_string(A));
    expect(errors, static_cast<int>(gen.opt_witness.size()) == (k - 1) * B,
           tag + ": witness size != (k-1)B");
    expect(errors, feasible(gen.instance, gen.opt_witness, B).feasible,
           tag + ": witness infeasible");
    SimResult mf;
    run_checked(errors, gen.instance, B, PolicyKind::MF, mf);
    expect(errors, mf.gain >= k * (A / 2), tag + ": V_MF = " + std::to_string(mf.gain) +
                                               " below k*floor(A/2) = " +
                                               std::to_string(k * (A / 2)));
  }
}

void criterion_competitive_bound_random(std::vector<std::string>& errors) {
  for (const auto& [k, B] : std::vector<std::pair<int, int>>{{2, 4}, {2, 6}, {3, 6}}) {
    const long long num = 5LL * B + B / k - 4;
    const long long den = B / (2 * k);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const int n_frames = 3 + static_cast<int>(seed % 10);
      const Instance in = gen_random_order_respecting(k, n_frames, seed);
      if (seed < 50 && !validate_order_respecting(in).empty()) {
        errors.push_back("seed " + std::to_string(seed) + ": not order-respecting");
      }
      const int v_opt = opt_bruteforce(in, B).gain;
      SimResult sim;
      run_checked(errors, in, B, PolicyKind::MF, sim);
      const std::string tag =
          "k=" + std::to_string(k) + " B=" + std::to_string(B) + " seed=" + std::to_string(seed);
      if (v_opt >= 1 && sim.gain < 1) {
        errors.push_back(tag + ": V_OPT >= 1 but V_MF = 0");
        continue;
      }
      if (static_cast<long long>(v_opt) * den > num * sim.gain) {
        errors.push_back(tag + ": V_OPT/V_MF = " + std::to_string(v_opt) + "/" +
                         std::to_string(sim.gain) + " exceeds the bound");
      }
      if (errors.size() > 20) return;  // enough evidence
    }
  }
}

void criterion_randomized_lower_bound(std::vector<std::string>& errors) {
  const int k = 3, y = 6, B = 4;
  const int z = choose_z(k, B, y, PolicyKind::MF);
  const GeneratedCase gen = gen_rand_lower_bound(k, B, y, z);
  expect(errors, validate_order_respecting(gen.instance).empty(), "not order-respecting");
  expect(errors, static_cast<int>(gen.opt_witness.size()) == y * B, "witness size != yB");
  expect(errors, feasible(gen.instance, gen.opt_witness, B).feasible, "witness infeasible");
  SimResult sim;
  run_checked(errors, gen.instance, B, PolicyKind::MF, sim);
  const int bound = y * B / (k - 1) + (k - 2) * B;
  expect(errors, sim.gain <= bound,
         "V_MF = " + std::to_string(sim.gain) + " above " + std::to_string(bound));
}

void criterion_oracle_cross_validation(std::vector<std::string>& errors) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const int k = seed % 2 == 0 ? 2 : 3;
    const int n_frames = 3 + static_cast<int>(seed % 10);
    const int B = 3 + static_cast<int>(seed % 4);
    const Instance in = gen_random_order_respecting(k, n_frames, seed);
    const OptResult brute = opt_bruteforce(in, B);
    const OptResult bnb = opt_branch_bound(in, B);
    const std::string tag = "seed=" + std::to_string(seed);
    if (brute.gain != bnb.gain) {
      errors.push_back(tag + ": gains differ, brute " + std::to_string(brute.gain) + " vs bb " +
                       std::to_string(bnb.gain));
    }
    if (!feasible(in, brute.witness, B) || !feasible(in, bnb.witness, B)) {
      errors.push_back(tag + ": returned witness infeasible");
    }
    if (errors.size() > 20) return;
  }
}

void criterion_invariant_suite(std::vector<std::string>& errors) {
  expect(errors, g_invariant_violations == 0,
         std::to_string(g_invariant_violations) + " invariant violations across all runs");

  // each checker must be able to fail
  const GeneratedCase gen = gen_appendix_b();
  const SimResult clean = run_policy(gen.instance, gen.B, PolicyKind::MF);
  auto fires = [&](const std::string& check, SimResult bad) {
    for (const auto& v : check_invariants(bad, gen.instance, gen.B)) {
      if (v.check == check) return true;
    }
    return false;
  };

  {
    SimResult bad = clean;
    for (TraceEvent& e : bad.trace) {
      if (e.actor == Actor::MF && e.packet == PacketId{49, 1}) {
        e.block = 1;
        break;
      }
    }
    expect(errors, fires("block-consistency", bad) || fires("block-partition", bad),
           "block tampering must fire a checker");
  }
  {
    SimResult bad = clean;
    for (std::size_t i = 0; i < bad.trace.size(); ++i) {
      if (bad.trace[i].action == TraceAction::Flush && bad.trace[i].packet == PacketId{50, 3}) {
        bad.trace.erase(bad.trace.begin() + static_cast<long>(i));
        break;
      }
    }
    expect(errors, fires("flush-completeness", bad), "flush-completeness must be able to fire");
  }
  {
    SimResult bad = clean;
    for (TraceEvent& e : bad.trace) {
      if (e.action == TraceAction::Transmit && e.packet == PacketId{1, 1}) {
        e.packet = PacketId{2, 1};
        break;
      }
    }
    expect(errors, fires("replay", bad), "replay must be able to fire");
  }
  {
    SimResult bad = clean;
    for (std::size_t i = 0; i < bad.trace.size(); ++i) {
      if (bad.trace[i].action == TraceAction::Transmit && bad.trace[i].packet == PacketId{1, 1}) {
        bad.trace.erase(bad.trace.begin() + static_cast<long>(i));
        break;
      }
    }
    expect(errors, fires("prompt-delivery", bad), "prompt-delivery must be able to fire");
  }
  {
    RunOptions opts;
    opts.mf_cap_override = 5;
    const SimResult bad = run_policy(gen.instance, gen.B, PolicyKind::MF, opts);
    expect(errors, fires("per-index-cap", bad), "per-index-cap must be able to fire");
    expect(errors, fires("block-partition", bad), "block-partition must be able to fire");
  }
  {
    SimResult bad = clean;
    bad.gain = 99;
    expect(errors, fires("gain", bad), "gain must be able to fire");
  }
  {
    // two buffered 1-packets with decreasing block numbers
    SimResult bad;
    bad.trace = {
        TraceEvent{0, 0, {1, 1}, Actor::MF, TraceAction::Accept, "1.2.1", 2},
        TraceEvent{0, 1, {2, 1}, Actor::MF, TraceAction::Accept, "1.2.1", 1},
        TraceEvent{0, 2, {1, 1}, Actor::MF, TraceAction::Transmit, "", 2},
        TraceEvent{1, 0, {2, 1}, Actor::MF, TraceAction::Transmit, "", 1},
    };
    bad.completed = {1, 2};
    bad.gain = 2;
    Instance tiny;
    tiny.k = 1;
    tiny.n_frames = 2;
    tiny.phases.resize(1);
    tiny.phases[0] = {{1, 1}, {2, 1}};
    bool fired = false;
    for (const auto& v : check_invariants(bad, tiny, 12)) fired |= (v.check == "block-order");
    expect(errors, fired, "block-order must be able to fire");
  }
  {
    SimResult bad = clean;
    Trace padded;
    for (const TraceEvent& e : bad.trace) {
      padded.push_back(e);
      if (e.phase == 0 && e.actor == Actor::GR1 && e.action == TraceAction::Accept) {
        padded.push_back(TraceEvent{0, e.seq, {e.packet.frame + 24, 1}, Actor::MF,
                                    TraceAction::Accept, "1.2.1", 1});
      }
    }
    bad.trace = std::move(padded);
    expect(errors, fires("occupancy", bad), "occupancy must be able to fire");
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"appendix-b family: golden decision trace (k=3, B=12), exact rows", 1.0,
       criterion_appendix_b_golden},
      {"det-lb family: adaptive adversary grid, exact integer gains", 10.0,
       criterion_deterministic_lower_bound},
      {"sp-killer family: V_SP = A, witness (k-1)B, V_MF >= k*floor(A/2)", 30.0,
       criterion_sp_killer},
      {"random family: competitive bound on 1000 instances per (k,B)", 120.0,
       criterion_competitive_bound_random},
      {"rand-lb family (k=3, y=6, B=4): feasible witness, capped policy", 5.0,
       criterion_randomized_lower_bound},
      {"Oracle cross-validation on 500 seeded instances", 60.0,
       criterion_oracle_cross_validation},
      {"Invariant suite: zero violations plus fault injection", 30.0, criterion_invariant_suite},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> errors;
    try {
      criteria[i].body(errors);
    } catch (const std::exception& e) {
      errors.push_back(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > criteria[i].budget_seconds) {
      errors.push_back("runtime " + std::to_string(seconds) + "s over budget " +
                       std::to_string(criteria[i].budget_seconds) + "s");
    }
    const bool pass = errors.empty();
    failures += !pass;
    std::printf("[%s] criterion %zu: %s (%.2fs)\n", pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name.c_str(), seconds);
    for (const auto& e : errors) std::printf("       %s\n", e.c_str());
  }
  return failures == 0 ? 0 : 1;
}
