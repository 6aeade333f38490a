// Command-line front end. Everything goes through the C API of libskmac.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "skmac.h"

namespace {

using nlohmann::json;

const char* kind_of(skm_status st) {
  switch (st) {
    case SKM_ERR_INVALID_ARGUMENT:
      return "invalid-argument";
    case SKM_ERR_SCHEMA:
      return "schema";
    case SKM_ERR_IO:
      return "file";
    case SKM_ERR_BUDGET:
      return "budget";
    default:
      return "internal";
  }
}

int exit_code_of(skm_status st) {
  switch (st) {
    case SKM_ERR_SCHEMA:
      return 2;
    case SKM_ERR_IO:
      return 3;
    case SKM_ERR_BUDGET:
      return 4;
    case SKM_ERR_INVALID_ARGUMENT:
      return 5;
    default:
      return 6;
  }
}

int report_error(skm_status st) {
  json err{{"error", {{"kind", kind_of(st)}, {"message", skm_last_error()}}}};
  std::cout << err.dump(2) << "\n";
  return exit_code_of(st);
}

// Writes to --out when given (human summary on stdout), else prints the JSON.
int deliver(char* report, const std::string& out_path) {
  std::string text = report;
  skm_string_free(report);
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f.good()) {
      json err{{"error", {{"kind", "file"}, {"message", "cannot write " + out_path}}}};
      std::cout << err.dump(2) << "\n";
      return 3;
    }
    f << text << "\n";
    json j = json::parse(text);
    std::cout << j["command"].get<std::string>() << ": ok, report written to " << out_path << "\n";
  } else {
    std::cout << text << "\n";
  }
  return 0;
}

struct ChannelHandle {
  skm_channel* ch = nullptr;
  ~ChannelHandle() { skm_channel_free(ch); }
};

skm_status open_channel(const std::string& spec, ChannelHandle& h) {
  if (spec == "adder" || spec == "xor" || spec == "useless" || spec.rfind("noisy-adder:", 0) == 0)
    return skm_channel_builtin(spec.c_str(), &h.ch);
  return skm_channel_load(spec.c_str(), &h.ch);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secret-key generation over a two-input MAC with public communication"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker thread cap for Monte Carlo stages");

  std::string out_path;
  app.add_option("--out", out_path, "write the JSON report to this file");

  // rstar
  auto* c_rstar = app.add_subcommand("rstar", "maximum symmetric rate of the no-feedback capacity region");
  std::string rstar_channel;
  int rstar_grid = 33, rstar_refine = 40;
  std::uint64_t rstar_seed = 1;
  c_rstar->add_option("--channel", rstar_channel, "channel file or builtin name")->required();
  c_rstar->add_option("--grid", rstar_grid, "grid points per simplex dimension");
  c_rstar->add_option("--refine", rstar_refine, "refinement iterations");
  c_rstar->add_option("--seed", rstar_seed, "seed (used only if the grid is subsampled)");

  // fbcode-rate
  auto* c_fb = app.add_subcommand("fbcode-rate", "analytic rate of the two-phase adder feedback code");
  std::int64_t fb_k = 1000;
  double fb_slack = 3.0;
  c_fb->add_option("--k", fb_k, "phase-1 length")->required();
  c_fb->add_option("--slack", fb_slack, "phase-2 budget slack c");

  // simulate-code
  auto* c_sim = app.add_subcommand("simulate-code", "Monte Carlo decode error of the adder feedback code");
  std::string sim_channel = "adder";
  int sim_k = 1000;
  double sim_slack = 4.0;
  std::uint64_t sim_trials = 10000, sim_seed = 0;
  c_sim->add_option("--channel", sim_channel, "channel file or builtin name");
  c_sim->add_option("--k", sim_k, "phase-1 length")->required();
  c_sim->add_option("--slack", sim_slack, "phase-2 budget slack c");
  c_sim->add_option("--trials", sim_trials, "Monte Carlo trials")->required();
  c_sim->add_option("--seed", sim_seed, "master seed")->required();

  // bound
  auto* c_bound = app.add_subcommand("bound", "one-shot converse over fractional partitions");
  std::string bound_law, bound_partition = "lp";
  double bound_eps = 0.01;
  int bound_m = 0;
  c_bound->add_option("--law", bound_law, "law file over (Y_1..Y_m, K, F)")->required();
  c_bound->add_option("--partition", bound_partition, "'lp', 'all', or blocks like '1|2,3'");
  c_bound->add_option("--eps", bound_eps, "recoverability epsilon")->required();
  c_bound->add_option("--m", bound_m, "terminal count (default: variables minus 2)");

  // check-interactive
  auto* c_chk = app.add_subcommand("check-interactive", "interactive-communication entropy inequality");
  std::string chk_proto, chk_law, chk_partition = "all";
  c_chk->add_option("--proto", chk_proto, "interactive protocol file")->required();
  c_chk->add_option("--law", chk_law, "law file over (Y_1..Y_m)")->required();
  c_chk->add_option("--partition", chk_partition, "'all' or blocks like '1|2,3'");

  // sk-se
  auto* c_se = app.add_subcommand("sk-se", "source-emulation secret-key scheme");
  std::string se_channel;
  int se_n = 8;
  double se_r1 = 0.75, se_r2 = 0.75;
  std::uint64_t se_trials = 2000, se_seed = 0;
  c_se->add_option("--channel", se_channel, "channel file or builtin name")->required();
  c_se->add_option("--n", se_n, "channel uses")->required();
  c_se->add_option("--rate1", se_r1, "user 1 rate, bits/use");
  c_se->add_option("--rate2", se_r2, "user 2 rate, bits/use");
  c_se->add_option("--trials", se_trials, "Monte Carlo trials");
  c_se->add_option("--seed", se_seed, "master seed")->required();

  // sk-feedback
  auto* c_skf = app.add_subcommand("sk-feedback", "feedback secret-key pipeline");
  std::string skf_channel;
  int skf_k = 1000, skf_blocks = 400;
  double skf_dsw = 0.1, skf_dpa = 0.02, skf_slack = 3.0;
  std::uint64_t skf_seed = 0;
  c_skf->add_option("--channel", skf_channel, "channel file or builtin name")->required();
  c_skf->add_option("--k", skf_k, "phase-1 length (adder) / per-user bits (xor)")->required();
  c_skf->add_option("--blocks", skf_blocks, "i.i.d. block count N");
  c_skf->add_option("--dsw", skf_dsw, "Slepian-Wolf slack, bits per block");
  c_skf->add_option("--dpa", skf_dpa, "privacy-amplification slack, bits per paired slot");
  c_skf->add_option("--slack", skf_slack, "phase-2 budget slack c");
  c_skf->add_option("--seed", skf_seed, "master seed")->required();

  // sk-run
  auto* c_run = app.add_subcommand("sk-run", "run a communication-transmission protocol file");
  std::string run_proto, run_channel;
  bool run_exact = false;
  std::uint64_t run_trials = 0, run_seed = 0;
  c_run->add_option("--proto", run_proto, "ct protocol file")->required();
  c_run->add_option("--channel", run_channel, "channel file or builtin name")->required();
  c_run->add_flag("--exact", run_exact, "exact exhaustive evaluation");
  c_run->add_option("--trials", run_trials, "Monte Carlo trials (omit with --exact)");
  c_run->add_option("--seed", run_seed, "master seed (required with --trials)");

  // verify-suite
  auto* c_ver = app.add_subcommand("verify-suite", "cross-module property batteries");
  std::string ver_level = "quick";
  std::uint64_t ver_seed = 1;
  c_ver->add_option("level", ver_level, "quick or full");
  c_ver->add_option("--seed", ver_seed, "master seed");

  CLI11_PARSE(app, argc, argv);

  char* report = nullptr;
  skm_status st = SKM_OK;

  if (*c_rstar) {
    ChannelHandle h;
    st = open_channel(rstar_channel, h);
    if (st == SKM_OK) st = skm_rstar(h.ch, rstar_grid, rstar_refine, rstar_seed, &report);
  } else if (*c_fb) {
    st = skm_fbcode_rate(fb_k, fb_slack, &report);
  } else if (*c_sim) {
    ChannelHandle h;
    st = open_channel(sim_channel, h);
    if (st == SKM_OK) st = skm_simulate_code(h.ch, sim_k, sim_slack, sim_trials, sim_seed, threads, &report);
  } else if (*c_bound) {
    skm_joint* law = nullptr;
    st = skm_joint_load(bound_law.c_str(), &law);
    if (st == SKM_OK) {
      json j = json::parse(std::ifstream(bound_law), nullptr, false);
      int m = bound_m;
      if (m <= 0 && j.is_object() && j.contains("arity")) m = static_cast<int>(j["arity"].size()) - 2;
      st = skm_bound(law, m, bound_partition.c_str(), bound_eps, &report);
      skm_joint_free(law);
    }
  } else if (*c_chk) {
    st = skm_check_interactive(chk_proto.c_str(), chk_law.c_str(), chk_partition.c_str(), &report);
  } else if (*c_se) {
    ChannelHandle h;
    st = open_channel(se_channel, h);
    if (st == SKM_OK) st = skm_sk_se(h.ch, se_n, se_r1, se_r2, se_trials, se_seed, &report);
  } else if (*c_skf) {
    ChannelHandle h;
    st = open_channel(skf_channel, h);
    if (st == SKM_OK)
      st = skm_sk_feedback(h.ch, skf_k, skf_blocks, skf_dsw, skf_dpa, skf_slack, skf_seed, threads, &report);
  } else if (*c_run) {
    if ((!run_exact && run_trials == 0) || (run_trials > 0 && c_run->count("--seed") == 0)) {
      json err{{"error",
                {{"kind", "invalid-argument"}, {"message", "sk-run needs --exact or --trials <t> --seed <s>"}}}};
      std::cout << err.dump(2) << "\n";
      return 5;
    }
    ChannelHandle h;
    st = open_channel(run_channel, h);
    if (st == SKM_OK) st = skm_sk_run(run_proto.c_str(), h.ch, run_exact ? 0 : run_trials, run_seed, &report);
  } else if (*c_ver) {
    if (ver_level != "quick" && ver_level != "full") {
      json err{{"error", {{"kind", "invalid-argument"}, {"message", "level must be quick or full"}}}};
      std::cout << err.dump(2) << "\n";
      return 5;
    }
    st = skm_verify_suite(ver_level == "full" ? 1 : 0, ver_seed, threads, &report);
    if (st == SKM_OK) {
      json j = json::parse(report);
      bool pass = j["results"]["pass"].get<bool>();
      for (const auto& b : j["results"]["batteries"])
        std::cerr << (b["pass"].get<bool>() ? "[pass] " : "[FAIL] ") << b["name"].get<std::string>()
                  << (b["detail"].get<std::string>().empty() ? "" : "  (" + b["detail"].get<std::string>() + ")")
                  << "\n";
      int rc = deliver(report, out_path);
      return rc != 0 ? rc : (pass ? 0 : 1);
    }
  }

  if (st != SKM_OK) return report_error(st);
  return deliver(report, out_path);
}
