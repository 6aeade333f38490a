#include "skmac.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <string>

#include "core/bound.hpp"
#include "core/ctproto.hpp"
#include "core/fbcode.hpp"
#include "core/iproto.hpp"
#include "core/pipeline.hpp"
#include "core/rates.hpp"
#include "core/schema.hpp"
#include "core/verify.hpp"

using namespace skmac;

struct skm_channel {
  MacChannel ch;
};
struct skm_joint {
  JointDist j;
};

namespace {

thread_local std::string g_last_error;

skm_status fail(skm_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
skm_status guard(Fn&& fn) {
  try {
    fn();
    return SKM_OK;
  } catch (const SchemaError& e) {
    return fail(SKM_ERR_SCHEMA, e.what());
  } catch (const IoError& e) {
    return fail(SKM_ERR_IO, e.what());
  } catch (const BudgetError& e) {
    return fail(SKM_ERR_BUDGET, e.what());
  } catch (const InvalidArgumentError& e) {
    return fail(SKM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(SKM_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(const Json& report, char** out) { *out = dup_string(report.dump(2)); }

std::vector<int> to_vec(const int* p, size_t n) { return std::vector<int>(p, p + n); }

Json stage_errors_json(const std::vector<StageErrorCount>& v) {
  Json arr = Json::array();
  for (const auto& s : v) arr.push_back(Json{{"stage", s.stage}, {"count", s.count}, {"total", s.total}});
  return arr;
}

}  // namespace

extern "C" {

const char* skm_last_error(void) { return g_last_error.c_str(); }

void skm_string_free(char* s) { std::free(s); }

skm_status skm_channel_load(const char* path, skm_channel** out) {
  return guard([&] { *out = new skm_channel{channel_from_json(load_json_file(path))}; });
}

skm_status skm_channel_from_json(const char* json_text, skm_channel** out) {
  return guard([&] {
    Json j;
    try {
      j = Json::parse(json_text);
    } catch (const std::exception& e) {
      throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    *out = new skm_channel{channel_from_json(j)};
  });
}

skm_status skm_channel_builtin(const char* name, skm_channel** out) {
  return guard([&] {
    std::string s = name;
    if (s == "adder")
      *out = new skm_channel{MacChannel::adder()};
    else if (s == "xor")
      *out = new skm_channel{MacChannel::xor_mac()};
    else if (s == "useless")
      *out = new skm_channel{MacChannel::useless()};
    else if (s.rfind("noisy-adder:", 0) == 0)
      *out = new skm_channel{MacChannel::noisy_adder(std::stod(s.substr(12)))};
    else
      throw InvalidArgumentError("unknown builtin channel: " + s);
  });
}

void skm_channel_free(skm_channel* ch) { delete ch; }

skm_status skm_channel_dims(const skm_channel* ch, int* in1, int* in2, int* out) {
  if (ch == nullptr) return fail(SKM_ERR_INVALID_ARGUMENT, "null channel");
  *in1 = ch->ch.in1_size();
  *in2 = ch->ch.in2_size();
  *out = ch->ch.out_size();
  return SKM_OK;
}

skm_status skm_joint_load(const char* path, skm_joint** out) {
  return guard([&] { *out = new skm_joint{law_from_json(load_json_file(path))}; });
}

skm_status skm_joint_from_json(const char* json_text, skm_joint** out) {
  return guard([&] {
    Json j;
    try {
      j = Json::parse(json_text);
    } catch (const std::exception& e) {
      throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    *out = new skm_joint{law_from_json(j)};
  });
}

void skm_joint_free(skm_joint* j) { delete j; }

skm_status skm_entropy(const skm_joint* j, const int* vars, size_t n_vars, double* out) {
  return guard([&] { *out = j->j.entropy(to_vec(vars, n_vars)); });
}

skm_status skm_conditional_entropy(const skm_joint* j, const int* a, size_t n_a, const int* b, size_t n_b,
                                   double* out) {
  return guard([&] { *out = j->j.conditional_entropy(to_vec(a, n_a), to_vec(b, n_b)); });
}

skm_status skm_mutual_information(const skm_joint* j, const int* a, size_t n_a, const int* b, size_t n_b,
                                  const int* given, size_t n_given, double* out) {
  return guard([&] { *out = j->j.mutual_information(to_vec(a, n_a), to_vec(b, n_b), to_vec(given, n_given)); });
}

skm_status skm_kl_divergence(const skm_joint* p, const skm_joint* q, double* out) {
  return guard([&] { *out = JointDist::kl_divergence(p->j, q->j); });
}

skm_status skm_security_index(const skm_joint* j, const int* kvars, size_t n_k, const int* fvars,
                              size_t n_f, double* out) {
  return guard([&] { *out = j->j.security_index(to_vec(kvars, n_k), to_vec(fvars, n_f)); });
}

skm_status skm_rstar(const skm_channel* ch, int grid, int refine, uint64_t seed, char** report_json) {
  return guard([&] {
    RstarOptions opts;
    if (grid > 0) opts.grid = grid;
    if (refine >= 0) opts.refine_iters = refine;
    opts.seed = seed;
    RstarResult res = compute_rstar(ch->ch, opts);
    Json results{{"rate", res.rate},
                 {"uncertainty", res.uncertainty},
                 {"grid_rate", res.grid_rate},
                 {"best_single_pentagon", res.best_single_pentagon},
                 {"max_isum_half", res.max_isum_half},
                 {"pairs_evaluated", res.pairs_evaluated}};
    emit(make_report("rstar", Json{{"grid", opts.grid}, {"refine", opts.refine_iters}}, results, seed),
         report_json);
  });
}

skm_status skm_fbcode_rate(int64_t k, double slack_c, char** report_json) {
  return guard([&] {
    if (k < 1 || k > (1ll << 40)) throw InvalidArgumentError("fbcode_rate: k out of range");
    double rate = adder_rate_analytic(static_cast<int>(k), slack_c);
    double mi = adder_code_mi_bits(static_cast<int>(k), slack_c);
    long long k0 = adder_k0_above_rstar(slack_c, std::max<long long>(k, 1 << 17));
    double asym = 2.0 / (2.0 + 1.0 / std::log2(3.0));
    Json results{{"rate", rate},
                 {"uncertainty", 0.0},
                 {"phase2_uses", adder_phase2_uses(static_cast<int>(k), slack_c)},
                 {"mi_per_block_bits", mi},
                 {"asymptotic_rate", asym},
                 {"k0_above_rstar", k0},
                 {"overflow_bound", adder_overflow_bound(slack_c)}};
    emit(make_report("fbcode-rate", Json{{"k", k}, {"slack", slack_c}}, results, 0), report_json);
  });
}

skm_status skm_simulate_code(const skm_channel* ch, int k, double slack_c, uint64_t trials, uint64_t seed,
                             int threads, char** report_json) {
  return guard([&] {
    AdderFeedbackCode code(k, slack_c);
    SimulationResult sim = simulate_code(ch->ch, code, trials, seed, threads);
    Json results{{"error_prob", sim.error_prob},
                 {"ci", Json::array({sim.ci_low, sim.ci_high})},
                 {"errors", sim.errors},
                 {"declared_failures", sim.declared_failures},
                 {"trials", sim.trials},
                 {"rate", code.rate_per_user()}};
    emit(make_report("simulate-code",
                     Json{{"k", k}, {"slack", slack_c}, {"trials", trials}, {"threads", threads}}, results,
                     seed),
         report_json);
  });
}

skm_status skm_bound(const skm_joint* law, int m_terminals, const char* partition_spec, double eps,
                     char** report_json) {
  return guard([&] {
    const JointDist& j = law->j;
    int m = m_terminals;
    if (m < 2 || j.num_vars() != m + 2)
      throw InvalidArgumentError("bound: law must have variables (Y_1..Y_m, K, F)");
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < m; ++i) groups.push_back({i});
    std::vector<int> kv{m}, fv{m + 1};
    std::string spec = partition_spec;
    Json results;
    if (spec == "lp" || spec == "all" || spec.empty()) {
      BestBound bb = best_bound_lp(j, groups);
      ConverseBoundResult r = one_shot_bound(j, groups, kv, fv, bb.lam, eps);
      Json lam = Json::object();
      for (std::uint32_t mask = 1; mask < (1u << m) - 1u; ++mask)
        if (bb.lam.weights[mask] > 1e-12) lam[std::to_string(mask)] = bb.lam.weights[mask];
      results = Json{{"bound_bits", r.bound_bits},
                     {"h_total", r.h_total},
                     {"penalty", r.penalty},
                     {"s_in", r.s_in},
                     {"nu", r.nu},
                     {"log_k", r.log_k},
                     {"lambda", lam},
                     {"lambda_source", "lp"}};
      if (spec == "all") {
        Json per = Json::array();
        for (const auto& pi : enumerate_partitions(m)) {
          ConverseBoundResult rp = one_shot_bound(j, groups, kv, fv, pi, eps);
          Json blocks = Json::array();
          for (auto b : pi.blocks) blocks.push_back(b);
          per.push_back(Json{{"blocks", blocks},
                             {"bound_bits", rp.bound_bits},
                             {"penalty", rp.penalty},
                             {"corollary_bound", rp.corollary_bound.value()}});
        }
        results["partitions"] = per;
      }
    } else {
      Partition pi = partition_from_spec(spec, m);
      ConverseBoundResult r = one_shot_bound(j, groups, kv, fv, pi, eps);
      results = Json{{"bound_bits", r.bound_bits},
                     {"h_total", r.h_total},
                     {"penalty", r.penalty},
                     {"s_in", r.s_in},
                     {"nu", r.nu},
                     {"log_k", r.log_k},
                     {"corollary_bound", r.corollary_bound.value()},
                     {"lambda_source", spec}};
    }
    emit(make_report("bound", Json{{"partition", spec}, {"eps", eps}, {"m", m}}, results, 0), report_json);
  });
}

skm_status skm_check_interactive(const char* proto_path, const char* law_path, const char* partition_spec,
                                 char** report_json) {
  return guard([&] {
    InteractiveProtocol proto = iproto_from_json(load_json_file(proto_path));
    JointDist law = law_from_json(load_json_file(law_path));
    std::string spec = partition_spec == nullptr ? "all" : partition_spec;
    Json checks = Json::array();
    bool all_hold = true;
    auto run_one = [&](const FractionalPartition& lam, const std::string& name) {
      InteractiveCheck chk = check_interactive_inequality(proto, law, lam);
      all_hold = all_hold && chk.holds;
      checks.push_back(Json{{"lambda", name}, {"lhs", chk.lhs}, {"rhs", chk.rhs}, {"holds", chk.holds}});
    };
    if (spec == "all") {
      for (const auto& pi : enumerate_partitions(proto.m())) {
        std::string name;
        for (auto b : pi.blocks) name += std::to_string(b) + ";";
        run_one(partition_to_fractional(pi), name);
      }
    } else {
      run_one(partition_to_fractional(partition_from_spec(spec, proto.m())), spec);
    }
    emit(make_report("check-interactive", Json{{"partition", spec}},
                     Json{{"holds", all_hold}, {"checks", checks}}, 0),
         report_json);
  });
}

skm_status skm_sk_se(const skm_channel* ch, int n, double rate1, double rate2, uint64_t trials,
                     uint64_t seed, char** report_json) {
  return guard([&] {
    SeSchemeReport rep = source_emulation_sk(ch->ch, n, {rate1, rate2}, seed, trials);
    Json results{{"scheme", rep.scheme},
                 {"key_rate", rep.key_rate},
                 {"key_bits", rep.key_bits},
                 {"agreement", rep.agreement},
                 {"agreement_mode", rep.agreement_exact ? "exact" : "estimate"},
                 {"s_in", rep.s_in},
                 {"s_in_mode", rep.s_in_exact ? "exact" : "estimate"},
                 {"comm_rate", rep.comm_rate},
                 {"samples", rep.samples}};
    emit(make_report("sk-se", Json{{"n", n}, {"rate1", rate1}, {"rate2", rate2}, {"trials", trials}},
                     results, seed),
         report_json);
  });
}

skm_status skm_sk_feedback(const skm_channel* ch, int k, int blocks, double dsw, double dpa, double slack_c,
                           uint64_t seed, int threads, char** report_json) {
  return guard([&] {
    PipelineParams pr;
    pr.blocks = blocks;
    pr.dsw = dsw;
    pr.dpa = dpa;
    pr.seed = seed;
    pr.threads = threads;
    std::shared_ptr<const FeedbackCode> code;
    if (ch->ch.out_size() == 3)
      code = std::make_shared<AdderFeedbackCode>(k, slack_c);
    else
      code = std::make_shared<TdmaIdentityCode>(k, ch->ch.out_size());
    PipelineReport rep = feedback_sk_scheme(ch->ch, code, pr);
    Json results{{"code", rep.code},
                 {"key_rate", rep.key_rate},
                 {"analytic_key_rate", rep.analytic_key_rate},
                 {"target_rate_per_slot", rep.target_rate_per_slot},
                 {"key_bits", rep.key_bits},
                 {"agreement", rep.agreement},
                 {"agreement_samples", rep.agreement_samples},
                 {"s_in", rep.s_in_total},
                 {"s_in_per_symbol", rep.s_in_per_symbol},
                 {"s_in_mode", rep.s_in_mode},
                 {"comm_rate", rep.comm_rate},
                 {"paired_slots", rep.paired_slots},
                 {"channel_uses_per_block", rep.channel_uses_per_block},
                 {"blocks", rep.blocks},
                 {"key_prefix_hex", rep.key_prefix_hex},
                 {"stage_errors", stage_errors_json(rep.stage_errors)}};
    emit(make_report("sk-feedback",
                     Json{{"k", k}, {"blocks", blocks}, {"dsw", dsw}, {"dpa", dpa}, {"slack", slack_c}},
                     results, seed),
         report_json);
  });
}

skm_status skm_sk_run(const char* proto_path, const skm_channel* ch, uint64_t trials, uint64_t seed,
                      char** report_json) {
  return guard([&] {
    CtProtocol proto = ct_from_json(load_json_file(proto_path));
    double key_rate = std::log2(static_cast<double>(proto.keys().alphabet)) / proto.n();
    double comm_rate = std::log2(static_cast<double>(proto.transcript_space())) / proto.n();
    Json results;
    if (trials == 0) {
      auto paths = enumerate_protocol(proto, ch->ch);
      KeyMetrics km = key_metrics_exact(proto, paths);
      results = Json{{"agreement", km.agreement}, {"s_in", km.s_in},     {"weak_rate", km.weak_rate},
                     {"s_in_mode", "exact"},      {"paths", km.samples}, {"n", proto.n()},
                     {"key_alphabet", proto.keys().alphabet}};
    } else {
      std::vector<SkTrace> traces;
      traces.reserve(trials);
      for (std::uint64_t i = 0; i < trials; ++i)
        traces.push_back(run_protocol(proto, ch->ch, derive_seed(seed, i)));
      KeyMetrics km = key_metrics_sampled(proto, traces);
      results = Json{{"agreement", km.agreement}, {"s_in", km.s_in},      {"weak_rate", km.weak_rate},
                     {"s_in_mode", "estimate"},   {"samples", km.samples}, {"n", proto.n()},
                     {"key_alphabet", proto.keys().alphabet}};
    }
    results["key_rate"] = key_rate;
    results["comm_rate"] = comm_rate;
    results["stage_errors"] = Json::array();
    emit(make_report("sk-run", Json{{"proto", proto_path}, {"trials", trials}}, results, seed), report_json);
  });
}

skm_status skm_verify_suite(int full, uint64_t seed, int threads, char** report_json) {
  return guard([&] {
    VerifyOptions opt;
    opt.full = full != 0;
    opt.seed = seed;
    opt.threads = threads;
    VerifyReport rep = run_verify(opt);
    Json batteries = Json::array();
    for (const auto& b : rep.batteries)
      batteries.push_back(Json{{"name", b.name}, {"pass", b.pass}, {"cases", b.cases}, {"detail", b.detail}});
    Json results{{"pass", rep.pass}, {"seconds", rep.seconds}, {"batteries", batteries}};
    emit(make_report("verify-suite", Json{{"level", opt.full ? "full" : "quick"}}, results, seed),
         report_json);
    if (!rep.pass) {
      // report is still written; the caller decides the exit code from "pass"
    }
  });
}

}  // extern "C"
