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

#include <catch2/catch_amalgamated.hpp>

#include "koftm/generate.hpp"
#include "koftm/opt.hpp"
#include "koftm/simulate.hpp"

using namespace koftm;

TEST_CASE("adaptive adversary: certified optimum and capped policy gain") {
  const GeneratedCase gen = gen_det_lower_bound(2, 4, PolicyKind::MF);
  const int X = 4;  // floor(B/(k-1))
  CHECK(validate_structure(gen.instance).empty());
  CHECK(validate_order_respecting(gen.instance).empty());
  REQUIRE(feasible(gen.instance, gen.opt_witness, gen.B));
  CHECK(gen.opt_witness.size() == 12);  // 2B + X
  const SimResult mf = run_policy(gen.instance, gen.B, PolicyKind::MF);
  CHECK(mf.gain <= X);
  // observed ratio at least 2B/X + 1 = 3, in exact integers
  CHECK(static_cast<long long>(gen.opt_witness.size()) * 1 >= 3LL * mf.gain);
}

TEST_CASE("adaptive adversary: unbounded regime below k-1") {
  const GeneratedCase gen = gen_det_lower_bound(4, 2, PolicyKind::MF);  // B <= k-2
  CHECK(validate_order_respecting(gen.instance).empty());
  REQUIRE(feasible(gen.instance, gen.opt_witness, gen.B));
  CHECK(gen.opt_witness.size() == 4);  // 2B, X = 0
  const SimResult mf = run_policy(gen.instance, gen.B, PolicyKind::MF);
  CHECK(mf.gain == 0);
}

TEST_CASE("adaptive adversary stays order-respecting across the grid and policies") {
  for (PolicyKind alg : {PolicyKind::MF, PolicyKind::SP, PolicyKind::Greedy}) {
    for (int k = 2; k <= 4; ++k) {
      for (int B : {k - 1, k, 2 * k, 9}) {
        if (B < 1) continue;
        const GeneratedCase gen = gen_det_lower_bound(k, B, alg);
        INFO(policy_name(alg) << " k=" << k << " B=" << B);
        CHECK(validate_structure(gen.instance).empty());
        CHECK(validate_order_respecting(gen.instance).empty());
        CHECK(feasible(gen.instance, gen.opt_witness, gen.B).feasible);
        CHECK(run_policy(gen.instance, gen.B, alg).gain <= B / (k - 1));
      }
    }
  }
}

TEST_CASE("group selection favours the least-accepted group") {
  const int k = 4, B = 3, y = 2;
  SECTION("a policy blind to group 1's measured packets") {
    auto blind = [&](const Instance& in, int) {
      SimResult sim;
      for (int t = 0; t < static_cast<int>(in.phases.size()); ++t) {
        int seq = 0;
        for (const PacketId& p : in.phases[static_cast<std::size_t>(t)]) {
          const int group = (p.frame - 1) / (y * B) + 1;
          const bool take = !(group == 1 && p.j == k - 1);
          sim.trace.push_back(TraceEvent{t, seq++, p, Actor::GREEDY,
                                         take ? TraceAction::Accept : TraceAction::Reject, "", 0});
        }
      }
      return sim;
    };
    CHECK(choose_z(k, B, y, blind) == 1);
  }
  SECTION("a symmetric acceptor ties and breaks to group 1") {
    auto take_all = [](const Instance& in, int) {
      SimResult sim;
      for (int t = 0; t < static_cast<int>(in.phases.size()); ++t) {
        int seq = 0;
        for (const PacketId& p : in.phases[static_cast<std::size_t>(t)]) {
          sim.trace.push_back(TraceEvent{t, seq++, p, Actor::GREEDY, TraceAction::Accept, "", 0});
        }
      }
      return sim;
    };
    CHECK(choose_z(k, B, y, take_all) == 1);
  }
}

TEST_CASE("group selection bound: the minimum is at most yB/(k-1)") {
  const int k = 3, B = 4, y = 6;
  const int z = choose_z(k, B, y, PolicyKind::MF);
  // recount the measured acceptances the way choose_z does
  RunOptions opts;
  opts.validate = false;
  const Instance prefix = detail::rand_lb_prefix(k, B, y);
  const SimResult sim = run_policy(prefix, B, PolicyKind::MF, opts);
  std::vector<int> totals(static_cast<std::size_t>(k), 0);
  for (const TraceEvent& e : sim.trace) {
    if (e.actor == Actor::GR1 || e.action != TraceAction::Accept) continue;
    const int group = (e.packet.frame - 1) / (y * B) + 1;
    if (e.packet.j == k - group) ++totals[static_cast<std::size_t>(group)];
  }
  CHECK(totals[static_cast<std::size_t>(z)] <= y * B / (k - 1));
}

TEST_CASE("oblivious family: witness streams and the policy is capped") {
  const GeneratedCase gen = gen_rand_lower_bound(3, 4, 6, PolicyKind::MF);
  CHECK(validate_structure(gen.instance).empty());
  CHECK(validate_order_respecting(gen.instance).empty());
  REQUIRE(gen.opt_witness.size() == 24);  // yB
  CHECK(feasible(gen.instance, gen.opt_witness, gen.B).feasible);
  const SimResult mf = run_policy(gen.instance, gen.B, PolicyKind::MF);
  CHECK(mf.gain <= 24 / 2 + 1 * 4);  // yB/(k-1) + (k-2)B = 16
}

TEST_CASE("oblivious family stays order-respecting over a grid") {
  for (int k : {3, 4}) {
    for (int B : {2, 4}) {
      for (int y : {1, 3}) {
        for (int z = 1; z <= k - 1; ++z) {
          const GeneratedCase gen = gen_rand_lower_bound(k, B, y, z);
          INFO("k=" << k << " B=" << B << " y=" << y << " z=" << z);
          CHECK(validate_structure(gen.instance).empty());
          CHECK(validate_order_respecting(gen.instance).empty());
          CHECK(feasible(gen.instance, gen.opt_witness, gen.B).feasible);
        }
      }
    }
  }
}

TEST_CASE("bursty family matches its certified claims") {
  const GeneratedCase gen = gen_sp_killer(4, 8);  // A=2, D=24, N=24
  CHECK(gen.instance.n_frames == 192);
  CHECK(validate_structure(gen.instance).empty());
  CHECK(validate_order_respecting(gen.instance).empty());

  CHECK(run_policy(gen.instance, gen.B, PolicyKind::SP).gain == 2);  // A
  REQUIRE(gen.opt_witness.size() == 24);                             // (k-1)B
  CHECK(feasible(gen.instance, gen.opt_witness, gen.B).feasible);
  CHECK(run_policy(gen.instance, gen.B, PolicyKind::MF).gain >= 4);  // k*floor(A/2)

  // 2-packets arrive in four bursts of 2D starting at NB
  for (int burst = 0; burst < 4; ++burst) {
    const int phase = 192 + 8 * burst;
    int count = 0;
    for (const PacketId& p : gen.instance.phases[static_cast<std::size_t>(phase)]) {
      count += (p.j == 2);
    }
    CHECK(count == 48);
  }
}

TEST_CASE("execution example carries its golden trace") {
  const GeneratedCase gen = gen_appendix_b();
  CHECK(gen.instance.k == 3);
  CHECK(gen.B == 12);
  CHECK(gen.instance.meta.at("A").get<int>() == 4);
  CHECK(gen.instance.n_frames == 120);
  REQUIRE_FALSE(gen.golden_trace.empty());

  // phase 120: r49 preempts r3; phase 121: r87 preempts r85
  auto find_accept = [&](PacketId p) -> const TraceEvent* {
    for (const TraceEvent& e : gen.golden_trace) {
      if (e.packet == p && e.action == TraceAction::Accept && e.actor == Actor::MF) return &e;
    }
    return nullptr;
  };
  const TraceEvent* r49 = find_accept({49, 3});
  REQUIRE(r49 != nullptr);
  CHECK(r49->phase == 120);
  CHECK(r49->case_label == "2.2.2");
  bool preempts_r3 = false;
  for (const TraceEvent& e : gen.golden_trace) {
    preempts_r3 |= (e.phase == 120 && e.seq == r49->seq && e.action == TraceAction::Preempt &&
                    e.packet == PacketId{3, 3});
  }
  CHECK(preempts_r3);

  const TraceEvent* r87 = find_accept({87, 3});
  REQUIRE(r87 != nullptr);
  CHECK(r87->phase == 121);
  bool preempts_r85 = false;
  for (const TraceEvent& e : gen.golden_trace) {
    preempts_r85 |= (e.phase == 121 && e.seq == r87->seq && e.action == TraceAction::Preempt &&
                     e.packet == PacketId{85, 3});
  }
  CHECK(preempts_r85);
}

TEST_CASE("bursty family: the exact surviving frames of the middle-drop policy") {
  // A = 2: the front half of each subbuffer segment survives, plus the
  // second half of the last segment
  const GeneratedCase gen = gen_sp_killer(4, 8);
  const SimResult mf = run_policy(gen.instance, gen.B, PolicyKind::MF);
  CHECK(mf.completed == std::vector<int>{1, 97, 145, 170});
  const SimResult sp = run_policy(gen.instance, gen.B, PolicyKind::SP);
  CHECK(sp.completed == std::vector<int>{1, 2});
}

TEST_CASE("adaptive adversary certificates are exactly optimal") {
  for (const auto& [k, B] : std::vector<std::pair<int, int>>{{2, 4}, {3, 8}, {4, 12}}) {
    const GeneratedCase gen = gen_det_lower_bound(k, B, PolicyKind::MF);
    const OptResult exact = opt_branch_bound(gen.instance, gen.B);
    INFO("k=" << k << " B=" << B);
    CHECK(exact.gain == static_cast<int>(gen.opt_witness.size()));
    CHECK(exact.gain == 2 * B + B / (k - 1));
  }
}

TEST_CASE("random family is order-respecting and reproducible") {
  for (std::uint64_t seed : {0ULL, 5ULL, 123ULL}) {
    const Instance a = gen_random_order_respecting(3, 10, seed);
    const Instance b = gen_random_order_respecting(3, 10, seed);
    REQUIRE(a == b);
    CHECK(validate_structure(a).empty());
    CHECK(validate_order_respecting(a).empty());
  }
  CHECK_FALSE(gen_random_order_respecting(3, 10, 1) == gen_random_order_respecting(3, 10, 2));
}
