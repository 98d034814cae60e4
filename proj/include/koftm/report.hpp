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

#ifndef KOFTM_REPORT_HPP
#define KOFTM_REPORT_HPP

#include <atomic>
#include <cctype>
#include <chrono>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "koftm/generate.hpp"
#include "koftm/invariants.hpp"
#include "koftm/model.hpp"
#include "koftm/opt.hpp"
#include "koftm/policy.hpp"
#include "koftm/simulate.hpp"

namespace koftm {

struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OptMode { BruteForce, BranchBound, Certificate };

inline const char* to_string(OptMode m) {
  switch (m) {
    case OptMode::BruteForce: return "brute";
    case OptMode::BranchBound: return "bb";
    case OptMode::Certificate: return "certificate";
  }
  return "?";
}

inline OptMode opt_mode_from_string(const std::string& s) {
  if (s == "brute") return OptMode::BruteForce;
  if (s == "bb") return OptMode::BranchBound;
  if (s == "certificate") return OptMode::Certificate;
  throw std::invalid_argument("unknown opt mode: " + s);
}

// Exact rational opt_gain / policy_gain; infinity when a positive optimum
// meets a zero policy gain.
struct Ratio {
  long long num = 0;
  long long den = 0;

  bool infinite() const { return den == 0 && num > 0; }

  // does num/den <= a/b hold (b > 0), with infinity larger than everything
  bool leq(long long a, long long b) const {
    if (infinite()) return false;
    if (den == 0) return true;  // 0/0: vacuous
    return num * b <= a * den;
  }

  bool geq(long long a, long long b) const {
    if (infinite()) return true;
    if (den == 0) return false;
    return num * b >= a * den;
  }

  nlohmann::json to_json() const {
    if (infinite()) return "inf";
    if (den == 0) return nullptr;
    return static_cast<double>(num) / static_cast<double>(den);
  }

  std::string str() const {
    if (infinite()) return "inf";
    if (den == 0) return "n/a";
    std::ostringstream os;
    os << static_cast<double>(num) / static_cast<double>(den);
    return os.str();
  }
};

struct PolicyReport {
  std::string policy;
  int gain = 0;
  Ratio ratio;
  std::vector<Violation> violations;
  double millis = 0.0;
};

struct RatioReport {
  std::string instance_name;
  int k = 0;
  int B = 0;
  std::string opt_mode;
  int opt_gain = 0;
  double opt_millis = 0.0;
  int order_violations = 0;
  std::vector<PolicyReport> policies;

  bool ok() const {
    if (order_violations > 0) return false;
    for (const auto& p : policies) {
      if (!p.violations.empty()) return false;
    }
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json pol = nlohmann::json::array();
    for (const auto& p : policies) {
      nlohmann::json v = nlohmann::json::array();
      for (const auto& x : p.violations) v.push_back(x.check + ": " + x.message);
      pol.push_back({{"policy", p.policy},
                     {"gain", p.gain},
                     {"ratio", p.ratio.to_json()},
                     {"violations", v},
                     {"millis", p.millis}});
    }
    return {{"instance", instance_name}, {"k", k},
            {"B", B},                    {"opt_mode", opt_mode},
            {"opt_gain", opt_gain},      {"opt_millis", opt_millis},
            {"order_violations", order_violations},
            {"policies", pol},           {"ok", ok()}};
  }
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace detail

// Runs each policy, computes or certifies the optimum, evaluates all
// invariant checks plus order-respecting validation, and reports gains and
// exact ratios. Certificate mode validates the supplied witness and treats
// infeasibility as a hard failure.
inline RatioReport run_ratio(const Instance& in, int B, const std::vector<PolicyKind>& policies,
                             OptMode mode, const std::vector<int>* witness = nullptr,
                             const RunOptions& run_opts = {}, int brute_limit = 22) {
  RatioReport report;
  report.instance_name = in.name;
  report.k = in.k;
  report.B = B;
  report.opt_mode = to_string(mode);
  report.order_violations = static_cast<int>(validate_order_respecting(in).size());

  const auto t0 = std::chrono::steady_clock::now();
  switch (mode) {
    case OptMode::BruteForce:
      report.opt_gain = opt_bruteforce(in, B, brute_limit).gain;
      break;
    case OptMode::BranchBound:
      report.opt_gain = opt_branch_bound(in, B).gain;
      break;
    case OptMode::Certificate: {
      if (witness == nullptr) throw std::invalid_argument("certificate mode needs a witness");
      if (!feasible(in, *witness, B)) {
        throw CertificateError("certificate witness of size " + std::to_string(witness->size()) +
                               " is infeasible on " + in.name);
      }
      report.opt_gain = static_cast<int>(witness->size());
      break;
    }
  }
  report.opt_millis = detail::elapsed_ms(t0);

  for (PolicyKind kind : policies) {
    PolicyReport pr;
    pr.policy = policy_name(kind);
    const auto t1 = std::chrono::steady_clock::now();
    const SimResult sim = run_policy(in, B, kind, run_opts);
    pr.millis = detail::elapsed_ms(t1);
    pr.gain = sim.gain;
    pr.ratio = Ratio{report.opt_gain, sim.gain};
    pr.violations = check_invariants(sim, in, B);
    report.policies.push_back(std::move(pr));
  }
  return report;
}

inline bool claim_holds(const Claim& claim, long long actual) {
  if (claim.relation == "==") return actual == claim.value;
  if (claim.relation == "<=") return actual <= claim.value;
  if (claim.relation == ">=") return actual >= claim.value;
  throw std::invalid_argument("unknown claim relation: " + claim.relation);
}

// One sweep entry expands into a grid of rows over k, B and seeds.
struct SweepEntry {
  std::string name;
  std::string family;  // det-lb | rand-lb | sp-killer | appendix-b | random
  std::vector<int> ks{2};
  std::vector<int> Bs{4};
  int y = 6;
  int frames = 8;
  std::uint64_t seed_lo = 0;
  std::uint64_t seed_hi = 1;
  PolicyKind alg = PolicyKind::MF;
  std::vector<PolicyKind> policies{PolicyKind::MF};
  OptMode opt_mode = OptMode::Certificate;
  bool check_ratio_bound = false;  // the B >= 2k competitive bound, oracle modes only
};

struct SweepConfig {
  std::vector<SweepEntry> entries;
};

inline std::vector<int> parse_int_list(const nlohmann::json& j) {
  std::vector<int> out;
  if (j.is_number_integer()) {
    out.push_back(j.get<int>());
  } else if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<int>());
  } else {
    throw std::invalid_argument("expected integer or integer array");
  }
  return out;
}

inline SweepConfig parse_sweep_config(const nlohmann::json& j) {
  SweepConfig cfg;
  for (const auto& e : j.value("entries", nlohmann::json::array())) {
    SweepEntry entry;
    entry.family = e.at("family").get<std::string>();
    entry.name = e.value("name", entry.family);
    if (e.contains("k")) entry.ks = parse_int_list(e.at("k"));
    if (e.contains("B")) entry.Bs = parse_int_list(e.at("B"));
    entry.y = e.value("y", entry.y);
    entry.frames = e.value("frames", entry.frames);
    if (e.contains("seeds")) {
      const auto& s = e.at("seeds");
      entry.seed_lo = s.at(0).get<std::uint64_t>();
      entry.seed_hi = s.at(1).get<std::uint64_t>();
    }
    entry.alg = policy_from_string(e.value("alg", "mf"));
    if (e.contains("policies")) {
      entry.policies.clear();
      for (const auto& p : e.at("policies")) {
        entry.policies.push_back(policy_from_string(p.get<std::string>()));
      }
    }
    entry.opt_mode = opt_mode_from_string(e.value("opt_mode", "certificate"));
    entry.check_ratio_bound = e.value("check_ratio_bound", false);
    cfg.entries.push_back(std::move(entry));
  }
  return cfg;
}

struct SweepReport {
  nlohmann::json rows = nlohmann::json::array();
  bool ok = true;

  std::string to_csv() const {
    std::ostringstream os;
    os << "entry,family,k,B,seed,policy,gain,opt_gain,ratio,ok\n";
    for (const auto& row : rows) {
      for (const auto& p : row.at("policies")) {
        os << row.at("entry").get<std::string>() << ',' << row.at("family").get<std::string>()
           << ',' << row.at("k") << ',' << row.at("B") << ',' << row.at("seed") << ','
           << p.at("policy").get<std::string>() << ',' << p.at("gain") << ','
           << row.at("opt_gain") << ',';
        const auto& r = p.at("ratio");
        if (r.is_string()) {
          os << r.get<std::string>();
        } else if (!r.is_null()) {
          os << r;
        }
        os << ',' << (row.at("ok").get<bool>() ? 1 : 0) << '\n';
      }
    }
    return os.str();
  }
};

namespace detail {

struct SweepTask {
  const SweepEntry* entry;
  int k;
  int B;
  std::uint64_t seed;
};

inline std::string claim_name_of(const std::string& policy) {
  std::string n = policy;
  for (char& c : n) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return "V_" + n;
}

inline nlohmann::json run_sweep_task(const SweepTask& task) {
  const SweepEntry& e = *task.entry;
  GeneratedCase gen;
  bool have_claims = true;
  if (e.family == "det-lb") {
    gen = gen_det_lower_bound(task.k, task.B, e.alg);
  } else if (e.family == "rand-lb") {
    gen = gen_rand_lower_bound(task.k, task.B, e.y, e.alg);
  } else if (e.family == "sp-killer") {
    gen = gen_sp_killer(task.k, task.B);
  } else if (e.family == "appendix-b") {
    gen = gen_appendix_b();
  } else if (e.family == "random") {
    gen.instance = gen_random_order_respecting(task.k, e.frames, task.seed);
    gen.B = task.B;
    have_claims = false;
  } else {
    throw std::invalid_argument("unknown family: " + e.family);
  }

  OptMode mode = e.opt_mode;
  if (mode == OptMode::Certificate && !have_claims) mode = OptMode::BruteForce;
  const RatioReport rr =
      run_ratio(gen.instance, gen.B, e.policies, mode, &gen.opt_witness);

  bool ok = rr.ok();
  nlohmann::json claims = nlohmann::json::array();
  for (const Claim& c : gen.claims) {
    long long actual = 0;
    bool applies = false;
    if (c.name == "V_OPT") {
      actual = rr.opt_gain;
      applies = true;
    } else {
      for (const auto& p : rr.policies) {
        if (claim_name_of(p.policy) == c.name) {
          actual = p.gain;
          applies = true;
        }
      }
    }
    if (!applies) continue;
    const bool holds = claim_holds(c, actual);
    ok = ok && holds;
    claims.push_back({{"name", c.name},
                      {"relation", c.relation},
                      {"value", c.value},
                      {"actual", actual},
                      {"holds", holds}});
  }

  if (e.check_ratio_bound && mode != OptMode::Certificate) {
    // competitive bound of the middle-drop policy, only claimed for B >= 2k
    const long long num = 5LL * gen.B + gen.B / task.k - 4;
    const long long den = gen.B / (2 * task.k);
    for (const auto& p : rr.policies) {
      if (p.policy != "mf") continue;
      const bool holds = den > 0 && p.ratio.leq(num, den) && (rr.opt_gain < 1 || p.gain >= 1);
      ok = ok && holds;
      claims.push_back({{"name", "ratio_bound"},
                        {"relation", "<="},
                        {"value", nlohmann::json::array({num, den})},
                        {"actual", p.ratio.to_json()},
                        {"holds", holds}});
    }
  }

  nlohmann::json row = rr.to_json();
  row["entry"] = e.name;
  row["family"] = e.family;
  row["seed"] = task.seed;
  row["claims"] = claims;
  row["ok"] = ok;
  return row;
}

}  // namespace detail

// Expands every entry's grid, runs each row as an isolated deterministic
// simulation (in parallel when jobs > 1) and aggregates rows in a fixed
// order. Any claim failure, invariant violation or infeasible certificate
// marks the report not-ok.
inline SweepReport sweep(const SweepConfig& cfg, int jobs = 1) {
  std::vector<detail::SweepTask> tasks;
  for (const SweepEntry& e : cfg.entries) {
    for (int k : e.ks) {
      for (int B : e.Bs) {
        if (e.family == "random") {
          for (std::uint64_t s = e.seed_lo; s < e.seed_hi; ++s) {
            tasks.push_back(detail::SweepTask{&e, k, B, s});
          }
        } else {
          tasks.push_back(detail::SweepTask{&e, k, B, 0});
        }
      }
    }
  }

  std::vector<nlohmann::json> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        results[i] = detail::run_sweep_task(tasks[i]);
      } catch (const std::exception& ex) {
        results[i] = {{"entry", tasks[i].entry->name}, {"family", tasks[i].entry->family},
                      {"k", tasks[i].k},               {"B", tasks[i].B},
                      {"seed", tasks[i].seed},         {"error", ex.what()},
                      {"ok", false}};
      }
    }
  };
  if (jobs <= 1 || tasks.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepReport report;
  for (auto& row : results) {
    report.ok = report.ok && row.value("ok", false);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace koftm

#endif  // KOFTM_REPORT_HPP
