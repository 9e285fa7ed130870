// Command-line surface: dimension, dichotomy, construct, counterexample and
// cf-bad subcommands over JSON configs, with reproducible run manifests.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stt/json_io.hpp"
#include "stt/version.hpp"

namespace fs = std::filesystem;
using namespace stt;

namespace {

constexpr int kExitDecided = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitInconclusive = 3;

struct RunContext {
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  int workers = 1;
  Json config;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
  std::vector<std::string> outputs;

  Json load_config() {
    if (config_path.empty()) throw std::invalid_argument("--config is required");
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config '" + config_path + "'");
    in >> config;
    return config;
  }

  void emit(const std::string& name, const std::string& payload) {
    if (out_dir.empty()) {
      std::cout << payload << "\n";
      return;
    }
    fs::create_directories(out_dir);
    fs::path p = fs::path(out_dir) / name;
    std::ofstream out(p, std::ios::binary);
    out << payload << "\n";
    outputs.push_back(name);
  }

  void write_manifest() {
    if (out_dir.empty()) return;
    auto wall =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started)
            .count();
    Json m;
    m["command"] = command;
    m["config_digest"] = fnv1a_digest(config.dump());
    m["seed"] = seed;
    m["workers"] = workers;
    m["tool_version"] = kVersion;
    m["wall_ms"] = wall;  // informational; not part of the reproducible payload
    Json outs = Json::array();
    for (const auto& o : outputs) outs.push_back(o);
    m["outputs"] = outs;
    std::ofstream out(fs::path(out_dir) / "manifest.json", std::ios::binary);
    out << m.dump(2) << "\n";
  }
};

int run_dimension(RunContext& ctx) {
  Json cfg = ctx.load_config();
  IfsSpec ifs = ifs_from_json(cfg.at("ifs"));
  PressureProfile profile(ifs);
  Json out;
  out["d"] = json_real(dimension(profile));
  out["separation"] = separation_to_json(ifs.check_separation());
  out["norm"] = ifs.norm_name();
  Json table = Json::array();
  if (cfg.contains("alphas")) {
    for (const auto& a : cfg.at("alphas")) {
      AlphaForm alpha = AlphaForm::parse(a.get<std::string>());
      double v = alpha.is_infinite() ? std::numeric_limits<double>::infinity() : alpha.value();
      table.push_back(Json{{"alpha", alpha.str()},
                           {"s", json_real(hv_exponent(profile, v))}});
    }
  }
  out["s_table"] = table;
  ctx.emit("dimension_result.json", out.dump(2));
  return kExitDecided;
}

int run_dichotomy(RunContext& ctx) {
  Json cfg = ctx.load_config();
  IfsSpec ifs = ifs_from_json(cfg.at("ifs"));
  ApproxFn psi = psi_from_json(cfg.at("psi"));
  SymbolStream x = cfg.contains("x") ? stream_from_json(cfg.at("x"), ifs.alphabet_size())
                                     : SymbolStream::constant(0);
  ClassifyOptions opts;
  if (cfg.contains("s")) opts.s = std::stod(cfg.at("s").get<std::string>());
  if (cfg.contains("ball_cylinder"))
    opts.ball_cylinder = Word::parse(cfg.at("ball_cylinder").get<std::string>(),
                                     ifs.alphabet_size());
  Verdict v = classify(ifs, x, psi, opts);
  ctx.emit("dichotomy_result.json", verdict_to_json(v, ifs).dump(2));
  return v.convergence == Convergence::inconclusive ? kExitInconclusive : kExitDecided;
}

int run_construct(RunContext& ctx) {
  Json cfg = ctx.load_config();
  IfsSpec ifs = ifs_from_json(cfg.at("ifs"));
  ApproxFn psi = psi_from_json(cfg.at("psi"));
  SymbolStream x = cfg.contains("x") ? stream_from_json(cfg.at("x"), ifs.alphabet_size())
                                     : SymbolStream::constant(0);
  RhoTable rho(ifs, x, psi);
  auto rate = psi.shrinking_rate();
  PressureProfile profile(ifs);
  double s = cfg.contains("s") ? std::stod(cfg.at("s").get<std::string>())
                               : hv_exponent(profile, rate.value);
  BigFloat alpha_hp = rate.exact_form && rate.exact_form->is_exact()
                          ? rate.exact_form->value_bigfloat()
                          : BigFloat(rate.value);
  EpsilonEval eps(rho, rate.value, s, alpha_hp, BigFloat(s));

  std::string mode = cfg.value("schedule_mode", "relaxed");
  ScheduleOptions sopts;
  if (cfg.contains("cap")) sopts.relaxed_cap = cfg.at("cap").get<std::int64_t>();
  if (cfg.contains("levels")) sopts.max_levels = cfg.at("levels").get<int>();
  Schedule sched = build_schedule(eps, mode == "strict", sopts);

  Json out;
  out["schedule"] = schedule_to_json(sched);
  out["covering_multiplicity_at_diam_over_7"] =
      covering_multiplicity(ifs, ifs.diam() / 7);

  int n_samples = cfg.value("samples", 0);
  if (n_samples > 0) {
    if (sched.strict)
      throw std::invalid_argument(
          "strict-mode schedules are not enumerable; request schedule_mode=relaxed to sample");
    std::int64_t depth_k = cfg.value("depth_k", 200);
    GibbsWeights g = make_gibbs(ifs, rate.value, s);
    std::vector<EtaSample> samples;
    std::string lines;
    int equal = 0;
    for (int i = 0; i < n_samples; ++i) {
      auto smp = sample_eta(sched, eps, g, depth_k, ctx.seed + static_cast<std::uint64_t>(i));
      if (smp.hit_set_equal) ++equal;
      lines += sample_to_json(smp, ifs.alphabet_size()).dump();
      lines += "\n";
      samples.push_back(std::move(smp));
    }
    if (!lines.empty()) lines.pop_back();
    ctx.emit("samples.jsonl", lines);
    out["hit_set_equal"] = Json{{"count", equal}, {"total", n_samples}};
    out["mass_bounds"] =
        mass_report_to_json(mass_bound_report(samples, sched, eps, g, cfg.value("k_stride", 25)));
  }
  ctx.emit("construct_result.json", out.dump(2));
  return kExitDecided;
}

int run_counterexample(RunContext& ctx) {
  Json cfg = ctx.load_config();
  CounterexampleConfig cx = CounterexampleConfig::standard();
  if (cfg.contains("ifs")) cx.ifs = ifs_from_json(cfg.at("ifs"));
  if (cfg.contains("alpha")) cx.alpha = std::stod(cfg.at("alpha").get<std::string>());
  if (cfg.contains("psi")) cx.psi = psi_from_json(cfg.at("psi"));
  if (cfg.contains("psibar")) cx.psibar = psi_from_json(cfg.at("psibar"));
  std::string which = cfg.value("which", "both");
  Json out;
  if (which == "prop31" || which == "both")
    out["transfer_obstruction"] = prop31_to_json(prop31_certificate(cx));
  if (which == "prop32" || which == "both") {
    WitnessOptions wopts;
    if (cfg.contains("n_seq")) {
      wopts.n_seq = cfg.at("n_seq").get<std::vector<std::int64_t>>();
      wopts.k_max = static_cast<int>(wopts.n_seq.size());
    }
    out["witness"] = prop32_to_json(prop32_witness(cx, wopts));
  }
  ctx.emit("counterexample_result.json", out.dump(2));
  return kExitDecided;
}

int run_cfbad(RunContext& ctx, int Q, const std::string& psi_arg, const std::string& s_arg,
              int depth) {
  ApproxFn psi = ApproxFn::pure_exponential(AlphaForm::from_real(1.0));
  double s = 0.5;
  if (!ctx.config_path.empty()) {
    Json cfg = ctx.load_config();
    if (cfg.contains("Q")) Q = cfg.at("Q").get<int>();
    if (cfg.contains("psi")) psi = psi_from_json(cfg.at("psi"));
    if (cfg.contains("s")) s = std::stod(cfg.at("s").get<std::string>());
    if (cfg.contains("depth")) depth = cfg.at("depth").get<int>();
  } else {
    ctx.config = Json{{"Q", Q}, {"psi", psi_arg}, {"s", s_arg}, {"depth", depth}};
  }
  if (!psi_arg.empty()) {
    // "exp:gamma=1.2" - pure exponential decay rate.
    auto pos = psi_arg.find("gamma=");
    if (psi_arg.rfind("exp:", 0) != 0 || pos == std::string::npos)
      throw std::invalid_argument("psi argument must look like exp:gamma=1.2");
    psi = ApproxFn::pure_exponential(AlphaForm::parse(psi_arg.substr(pos + 6)));
  }
  if (!s_arg.empty()) s = std::stod(s_arg);

  Json out;
  auto bracket = badQ_dimension(Q, std::min(depth + 2, 18));
  out["dimension_bracket"] = Json{{"lo", json_real(bracket.lo)},
                                  {"hi", json_real(bracket.hi)},
                                  {"depth", bracket.depth}};
  auto rep = bad_dichotomy(Q, psi, s, depth);
  out["series"] = bad_dichotomy_to_json(rep);
  BadQSystem sys{Q};
  if (Q >= 2)
    out["empirical_distortion"] = json_real(sys.empirical_distortion(200, 14, ctx.seed));
  auto sums = bad_sum(Q, psi, s, std::min(depth, 20));
  Json partials = Json::array();
  for (double v : sums.series_partial_log) partials.push_back(json_real(v));
  out["series_partial_log"] = partials;
  out["exact_levels"] = sums.exact_until;
  ctx.emit("cf_bad_result.json", out.dump(2));
  return rep.verdict == SeriesVerdict::inconclusive ? kExitInconclusive : kExitDecided;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shrinking-target toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  RunContext ctx;
  app.add_option("--config", ctx.config_path, "JSON configuration file");
  app.add_option("--seed", ctx.seed, "random seed for sampling commands");
  app.add_option("--out", ctx.out_dir, "output directory (results + manifest)");
  app.add_option("--workers", ctx.workers, "worker threads for enumeration");

  auto* sub_dim = app.add_subcommand("dimension", "attractor dimension and exponent table");
  auto* sub_dich = app.add_subcommand("dichotomy", "zero/full classification of a target family");
  auto* sub_cons = app.add_subcommand("construct", "schedules, sampling, and mass-bound reports");
  auto* sub_ce = app.add_subcommand("counterexample", "inhomogeneous-ratio obstruction reports");
  auto* sub_cf = app.add_subcommand("cf-bad", "bounded-quotient continued-fraction application");

  int cf_Q = 2, cf_depth = 12;
  std::string cf_psi, cf_s;
  sub_cf->add_option("--Q", cf_Q, "partial quotient bound");
  sub_cf->add_option("--psi", cf_psi, "target family, e.g. exp:gamma=1.2");
  sub_cf->add_option("--s", cf_s, "measure exponent");
  sub_cf->add_option("--depth", cf_depth, "quotient depth for the growth bracket");

  CLI11_PARSE(app, argc, argv);

  try {
    int code = kExitInvalid;
    if (sub_dim->parsed()) {
      ctx.command = "dimension";
      code = run_dimension(ctx);
    } else if (sub_dich->parsed()) {
      ctx.command = "dichotomy";
      code = run_dichotomy(ctx);
    } else if (sub_cons->parsed()) {
      ctx.command = "construct";
      code = run_construct(ctx);
    } else if (sub_ce->parsed()) {
      ctx.command = "counterexample";
      code = run_counterexample(ctx);
    } else if (sub_cf->parsed()) {
      ctx.command = "cf-bad";
      code = run_cfbad(ctx, cf_Q, cf_psi, cf_s, cf_depth);
    }
    ctx.write_manifest();
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}
