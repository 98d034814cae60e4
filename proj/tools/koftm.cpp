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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "koftm/generate.hpp"
#include "koftm/invariants.hpp"
#include "koftm/io.hpp"
#include "koftm/model.hpp"
#include "koftm/opt.hpp"
#include "koftm/policy.hpp"
#include "koftm/report.hpp"
#include "koftm/simulate.hpp"
#include "koftm/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

int oracle_frame_limit() {
  if (const char* env = std::getenv("KOFTM_OPT_MAX_FRAMES")) {
    return std::max(1, std::atoi(env));
  }
  return 22;
}

struct GenerateArgs {
  std::string family;
  std::string out;
  int k = 3;
  int B = 12;
  int y = 6;
  int z = 0;  // 0 = pick with choose_z
  int frames = 8;
  std::uint64_t seed = 0;
  std::string alg = "mf";
  int trials = 1;
  int tie_permille = 500;
  int max_gap = 3;
};

nlohmann::json claims_to_json(const koftm::GeneratedCase& gen) {
  nlohmann::json claims = nlohmann::json::array();
  for (const koftm::Claim& c : gen.claims) {
    claims.push_back({{"name", c.name}, {"relation", c.relation}, {"value", c.value},
                      {"note", c.note}});
  }
  return {{"family", gen.instance.meta.value("family", std::string{})},
          {"B", gen.B},
          {"witness", gen.opt_witness},
          {"claims", claims},
          {"meta", gen.instance.meta}};
}

int cmd_generate(const GenerateArgs& a) {
  koftm::GeneratedCase gen;
  if (a.family == "det-lb") {
    gen = koftm::gen_det_lower_bound(a.k, a.B, koftm::policy_from_string(a.alg));
  } else if (a.family == "rand-lb") {
    if (a.z > 0) {
      gen = koftm::gen_rand_lower_bound(a.k, a.B, a.y, a.z);
    } else {
      gen = koftm::gen_rand_lower_bound(a.k, a.B, a.y, koftm::policy_from_string(a.alg), a.trials);
    }
  } else if (a.family == "sp-killer") {
    gen = koftm::gen_sp_killer(a.k, a.B);
  } else if (a.family == "appendix-b") {
    gen = koftm::gen_appendix_b();
  } else if (a.family == "random") {
    gen.instance = koftm::gen_random_order_respecting(a.k, a.frames, a.seed,
                                                      {a.tie_permille, a.max_gap});
    gen.B = a.B;
  } else {
    std::cerr << "unknown family: " << a.family << "\n";
    return kExitUsage;
  }

  koftm::write_instance(gen.instance, a.out + ".jsonl");
  std::ofstream sidecar(a.out + ".claims.json");
  if (!sidecar) throw std::runtime_error("cannot open for writing: " + a.out + ".claims.json");
  sidecar << claims_to_json(gen).dump(2) << '\n';
  if (!gen.golden_trace.empty()) {
    koftm::write_trace_csv(gen.golden_trace, a.out + ".golden.csv");
  }

  const auto violations = koftm::validate_order_respecting(gen.instance);
  if (!violations.empty()) {
    std::cerr << "generated instance is not order-respecting (" << violations.size()
              << " frame pairs)\n";
    return kExitCheckFailed;
  }
  if (!gen.opt_witness.empty() && !koftm::feasible(gen.instance, gen.opt_witness, gen.B)) {
    std::cerr << "generated witness is infeasible\n";
    return kExitCheckFailed;
  }
  std::cout << "wrote " << a.out << ".jsonl (" << gen.instance.n_frames << " frames, "
            << koftm::total_packets(gen.instance) << " packets)\n";
  return kExitOk;
}

std::vector<koftm::PolicyKind> parse_policies(const std::vector<std::string>& names) {
  std::vector<koftm::PolicyKind> out;
  for (const std::string& n : names) out.push_back(koftm::policy_from_string(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-frame throughput maximization: policies, exact optimum, adversarial generators"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run one online policy over an instance");
  std::string sim_instance, sim_policy = "mf", sim_trace_out, sim_golden;
  int sim_B = 0;
  bool sim_check = false, sim_json = false, sim_sp_skip = false;
  sim_cmd->add_option("--instance", sim_instance, "instance file (JSON Lines)")->required();
  sim_cmd->add_option("--B", sim_B, "buffer capacity")->required();
  sim_cmd->add_option("--policy", sim_policy, "mf|sp|greedy");
  sim_cmd->add_option("--trace", sim_trace_out, "write the decision trace as CSV");
  sim_cmd->add_option("--golden", sim_golden, "compare decision rows against a golden trace CSV");
  sim_cmd->add_flag("--check", sim_check, "run the invariant checkers on the trace");
  sim_cmd->add_flag("--json", sim_json, "print the result as JSON");
  sim_cmd->add_flag("--sp-skip-invalid", sim_sp_skip, "SP rejects packets of broken frames");

  // opt
  auto* opt_cmd = app.add_subcommand("opt", "exact offline optimum");
  std::string opt_instance, opt_mode = "bb";
  int opt_B = 0;
  opt_cmd->add_option("--instance", opt_instance, "instance file")->required();
  opt_cmd->add_option("--B", opt_B, "buffer capacity")->required();
  opt_cmd->add_option("--mode", opt_mode, "bb|brute");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "construct an adversarial instance family");
  GenerateArgs gen_args;
  gen_cmd->add_option("--family", gen_args.family, "det-lb|rand-lb|sp-killer|appendix-b|random")
      ->required();
  gen_cmd->add_option("--out", gen_args.out, "output base path")->required();
  gen_cmd->add_option("--k", gen_args.k, "packets per frame");
  gen_cmd->add_option("--B", gen_args.B, "buffer capacity");
  gen_cmd->add_option("--y", gen_args.y, "subgroups per group (rand-lb)");
  gen_cmd->add_option("--z", gen_args.z, "favoured group (rand-lb); 0 picks via the policy");
  gen_cmd->add_option("--frames", gen_args.frames, "frame count (random)");
  gen_cmd->add_option("--seed", gen_args.seed, "seed (random)");
  gen_cmd->add_option("--alg", gen_args.alg, "driven policy (det-lb, rand-lb)");
  gen_cmd->add_option("--trials", gen_args.trials, "simulation repeats for choose_z");
  gen_cmd->add_option("--tie-permille", gen_args.tie_permille, "burst tie chance (random)");
  gen_cmd->add_option("--max-gap", gen_args.max_gap, "max inter-arrival gap (random)");

  // ratio
  auto* ratio_cmd = app.add_subcommand("ratio", "gains and competitive ratios vs the optimum");
  std::string ratio_instance, ratio_opt_mode = "bb", ratio_claims;
  int ratio_B = 0;
  bool ratio_sp_skip = false;
  std::vector<std::string> ratio_policies{"mf"};
  ratio_cmd->add_option("--instance", ratio_instance, "instance file")->required();
  ratio_cmd->add_option("--B", ratio_B, "buffer capacity")->required();
  ratio_cmd->add_option("--policies", ratio_policies, "policies to run")->delimiter(',');
  ratio_cmd->add_option("--opt-mode", ratio_opt_mode, "bb|brute|certificate");
  ratio_cmd->add_option("--claims", ratio_claims, "sidecar with witness and claims");
  ratio_cmd->add_flag("--sp-skip-invalid", ratio_sp_skip, "SP rejects packets of broken frames");

  // validate
  auto* val_cmd = app.add_subcommand("validate", "structural and order-respecting validation");
  std::string val_instance;
  val_cmd->add_option("--instance", val_instance, "instance file")->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter grid from a config file");
  std::string sweep_config, sweep_out_json, sweep_out_csv;
  int sweep_jobs = 1;
  sweep_cmd->add_option("--config", sweep_config, "sweep config (JSON)")->required();
  sweep_cmd->add_option("--jobs", sweep_jobs, "parallel workers");
  sweep_cmd->add_option("--out-json", sweep_out_json, "write rows as JSON");
  sweep_cmd->add_option("--out-csv", sweep_out_csv, "write rows as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) {
      const koftm::Instance in = koftm::read_instance(sim_instance);
      koftm::RunOptions opts;
      opts.sp_skip_invalid = sim_sp_skip;
      const koftm::SimResult res =
          koftm::run_policy(in, sim_B, koftm::policy_from_string(sim_policy), opts);
      if (!sim_trace_out.empty()) koftm::write_trace_csv(res.trace, sim_trace_out);
      std::vector<koftm::Violation> violations;
      if (sim_check) violations = koftm::check_invariants(res, in, sim_B);
      if (!sim_golden.empty()) {
        const koftm::Trace golden = koftm::read_trace_csv(sim_golden);
        const auto diff = koftm::compare_traces(res.trace, golden);
        for (std::size_t i = 0; i < diff.size() && i < 10; ++i) {
          violations.push_back(koftm::Violation{
              "golden", "row " + std::to_string(diff[i].index) + ": expected [" +
                            diff[i].expected + "] actual [" + diff[i].actual + "]"});
        }
        if (diff.size() > 10) {
          violations.push_back(koftm::Violation{
              "golden", std::to_string(diff.size() - 10) + " further differing rows"});
        }
      }
      if (sim_json) {
        nlohmann::json v = nlohmann::json::array();
        for (const auto& x : violations) v.push_back(x.check + ": " + x.message);
        std::cout << nlohmann::json{{"policy", sim_policy},
                                    {"gain", res.gain},
                                    {"completed", res.completed},
                                    {"events", res.trace.size()},
                                    {"violations", v}}
                         .dump(2)
                  << '\n';
      } else {
        std::cout << sim_policy << " gain " << res.gain << " (" << res.trace.size()
                  << " trace events)\n";
        for (const auto& x : violations) {
          std::cout << "violation [" << x.check << "] " << x.message << '\n';
        }
      }
      return violations.empty() ? kExitOk : kExitCheckFailed;
    }

    if (opt_cmd->parsed()) {
      const koftm::Instance in = koftm::read_instance(opt_instance);
      koftm::OptResult res;
      if (opt_mode == "brute") {
        res = koftm::opt_bruteforce(in, opt_B, oracle_frame_limit());
      } else if (opt_mode == "bb") {
        res = koftm::opt_branch_bound(in, opt_B);
      } else {
        std::cerr << "unknown opt mode: " << opt_mode << '\n';
        return kExitUsage;
      }
      std::cout << nlohmann::json{{"gain", res.gain},
                                  {"witness", res.witness},
                                  {"profile", res.occupancy_profile}}
                       .dump(2)
                << '\n';
      return kExitOk;
    }

    if (gen_cmd->parsed()) {
      return cmd_generate(gen_args);
    }

    if (ratio_cmd->parsed()) {
      const koftm::Instance in = koftm::read_instance(ratio_instance);
      koftm::RunOptions opts;
      opts.sp_skip_invalid = ratio_sp_skip;
      std::vector<int> witness;
      std::vector<koftm::Claim> claims;
      if (!ratio_claims.empty()) {
        std::ifstream f(ratio_claims);
        if (!f) throw std::runtime_error("cannot open for reading: " + ratio_claims);
        const nlohmann::json side = nlohmann::json::parse(f);
        witness = side.value("witness", std::vector<int>{});
        for (const auto& c : side.value("claims", nlohmann::json::array())) {
          claims.push_back(koftm::Claim{c.at("name").get<std::string>(),
                                        c.at("relation").get<std::string>(),
                                        c.at("value").get<long long>(), c.value("note", "")});
        }
      }
      const koftm::RatioReport report = koftm::run_ratio(
          in, ratio_B, parse_policies(ratio_policies), koftm::opt_mode_from_string(ratio_opt_mode),
          witness.empty() ? nullptr : &witness, opts, oracle_frame_limit());
      bool ok = report.ok();
      nlohmann::json out = report.to_json();
      nlohmann::json claim_rows = nlohmann::json::array();
      for (const koftm::Claim& c : claims) {
        long long actual = 0;
        bool applies = false;
        if (c.name == "V_OPT") {
          actual = report.opt_gain;
          applies = true;
        } else {
          for (const auto& p : report.policies) {
            if (koftm::detail::claim_name_of(p.policy) == c.name) {
              actual = p.gain;
              applies = true;
            }
          }
        }
        if (!applies) continue;
        const bool holds = koftm::claim_holds(c, actual);
        ok = ok && holds;
        claim_rows.push_back({{"name", c.name}, {"relation", c.relation}, {"value", c.value},
                              {"actual", actual}, {"holds", holds}});
      }
      out["claims"] = claim_rows;
      out["ok"] = ok;
      std::cout << out.dump(2) << '\n';
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (val_cmd->parsed()) {
      const koftm::Instance in = koftm::read_instance(val_instance);
      const auto structural = koftm::validate_structure(in);
      for (const auto& e : structural) std::cout << "structural: " << e << '\n';
      std::size_t order = 0;
      if (structural.empty()) {
        const auto violations = koftm::validate_order_respecting(in);
        order = violations.size();
        for (const auto& v : violations) {
          std::cout << "order: frames (" << v.frame_a << "," << v.frame_b << ") cross at indices ("
                    << v.j_a << "," << v.j_b << ")\n";
        }
      }
      if (structural.empty() && order == 0) {
        std::cout << "ok: " << in.n_frames << " frames, " << koftm::total_packets(in)
                  << " packets, order-respecting\n";
        return kExitOk;
      }
      return kExitCheckFailed;
    }

    if (sweep_cmd->parsed()) {
      std::ifstream f(sweep_config);
      if (!f) throw std::runtime_error("cannot open for reading: " + sweep_config);
      const koftm::SweepConfig cfg = koftm::parse_sweep_config(nlohmann::json::parse(f));
      const koftm::SweepReport report = koftm::sweep(cfg, sweep_jobs);
      if (!sweep_out_json.empty()) {
        std::ofstream out(sweep_out_json);
        if (!out) throw std::runtime_error("cannot open for writing: " + sweep_out_json);
        out << report.rows.dump(2) << '\n';
      }
      if (!sweep_out_csv.empty()) {
        std::ofstream out(sweep_out_csv);
        if (!out) throw std::runtime_error("cannot open for writing: " + sweep_out_csv);
        out << report.to_csv();
      }
      std::cout << report.rows.size() << " rows, " << (report.ok ? "all ok" : "FAILURES") << '\n';
      if (!report.ok) {
        for (const auto& row : report.rows) {
          if (!row.value("ok", false)) std::cout << row.dump() << '\n';
        }
      }
      return report.ok ? kExitOk : kExitCheckFailed;
    }
  } catch (const koftm::InternalError& e) {
    std::cerr << "internal invariant failure: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const koftm::CertificateError& e) {
    std::cerr << "certificate failure: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
