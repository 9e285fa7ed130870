#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "stt/approx_fn.hpp"
#include "stt/cf_bad.hpp"
#include "stt/construction.hpp"
#include "stt/counterexample.hpp"
#include "stt/dichotomy.hpp"
#include "stt/ifs.hpp"
#include "stt/schedule.hpp"
#include "stt/word.hpp"

namespace stt {

using Json = nlohmann::ordered_json;

// Reals ship as strings with 17 significant digits; rationals as exact
// "p/q" strings. Keeps outputs byte-stable across platforms.
inline std::string json_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json interval_json(const Interval& iv) {
  return Json{{"lo", json_real(iv.lo)}, {"hi", json_real(iv.hi)}};
}

// --- configuration ingestion -----------------------------------------------

inline IfsSpec ifs_from_json(const Json& j) {
  std::string mode = j.value("mode", "similarity");
  if (mode == "missing_digit") {
    return make_missing_digit_ifs(j.at("base").get<int>(),
                                  j.at("digits").get<std::vector<int>>());
  }
  if (mode != "similarity")
    throw std::invalid_argument("unsupported ifs mode '" + mode + "'");
  int dim = j.value("ambient_dim", 1);
  std::vector<SimilarityMap> maps;
  for (const auto& m : j.at("maps")) {
    SimilarityMap sm;
    sm.ratio = parse_rational(m.at("ratio").get<std::string>());
    if (m.at("translation").is_array()) {
      for (const auto& t : m.at("translation"))
        sm.translation.push_back(parse_rational(t.get<std::string>()));
    } else {
      sm.translation.push_back(parse_rational(m.at("translation").get<std::string>()));
    }
    sm.orientation = m.value("orientation", 1);
    maps.push_back(std::move(sm));
  }
  std::optional<Rational> diam;
  if (j.contains("diam")) diam = parse_rational(j.at("diam").get<std::string>());
  return IfsSpec::similarity(std::move(maps), dim, diam);
}

inline ApproxFn psi_from_json(const Json& j) {
  if (j.contains("table")) {
    std::vector<Rational> tbl;
    for (const auto& v : j.at("table")) tbl.push_back(parse_rational(v.get<std::string>()));
    return ApproxFn::from_table(std::move(tbl));
  }
  std::string family = j.value("family", "exp_poly");
  if (family != "exp_poly") throw std::invalid_argument("unsupported psi family");
  Rational c = j.contains("c") ? parse_rational(j.at("c").get<std::string>()) : Rational(1);
  BetaForm beta = BetaForm::rational(0);
  if (j.contains("beta")) {
    const auto& b = j.at("beta");
    if (b.is_object()) {
      beta = BetaForm::log_ratio(parse_rational(b.at("coeff").get<std::string>()),
                                 parse_rational(b.at("num").get<std::string>()),
                                 parse_rational(b.at("den").get<std::string>()));
    } else {
      beta = BetaForm::rational(parse_rational(b.get<std::string>()));
    }
  }
  AlphaForm alpha = AlphaForm::from_real(0);
  if (j.contains("alpha")) alpha = AlphaForm::parse(j.at("alpha").get<std::string>());
  return ApproxFn::exp_poly(std::move(c), std::move(beta), std::move(alpha));
}

inline SymbolStream stream_from_json(const Json& j, int alphabet_size) {
  if (j.contains("table"))
    return SymbolStream::finite(Word::parse(j.at("table").get<std::string>(), alphabet_size));
  Word prefix, cycle;
  if (j.contains("prefix"))
    prefix = Word::parse(j.at("prefix").get<std::string>(), alphabet_size);
  cycle = Word::parse(j.at("cycle").get<std::string>(), alphabet_size);
  return SymbolStream::eventually_periodic(std::move(prefix), std::move(cycle));
}

// --- result emission --------------------------------------------------------

inline Json verdict_to_json(const Verdict& v, const IfsSpec& ifs) {
  Json j;
  j["s"] = json_real(v.s);
  j["alpha"] = v.alpha_infinite ? "inf" : json_real(v.alpha);
  j["dim_w"] = json_real(v.dim_w);
  j["convergence"] = to_string(v.convergence);
  j["measure_statement"] = to_string(v.measure);
  j["heuristic"] = v.heuristic;
  j["critical_series"] = v.critical_series;
  j["provenance"] = v.provenance;
  j["norm"] = ifs.norm_name();
  if (v.ball_restriction) j["ball_restriction"] = *v.ball_restriction;
  if (!v.partial_sums.empty()) {
    Json arr = Json::array();
    for (double p : v.partial_sums) arr.push_back(json_real(p));
    j["partial_sums"] = arr;
  }
  return j;
}

inline Json separation_to_json(const SeparationReport& rep) {
  Json j;
  switch (rep.kind) {
    case Separation::ssc: j["kind"] = "SSC"; break;
    case Separation::osc_only: j["kind"] = "OSC-only"; break;
    case Separation::overlapping: j["kind"] = "overlapping"; break;
    case Separation::unknown: j["kind"] = "unknown"; break;
  }
  if (rep.gap) j["gap"] = format_rational(*rep.gap);
  return j;
}

inline Json schedule_to_json(const Schedule& s) {
  Json j;
  j["mode"] = s.strict ? "strict" : "relaxed";
  j["certifying"] = s.certifying;
  j["alpha"] = json_real(s.alpha);
  j["s"] = json_real(s.s);
  j["n1_floor"] = s.n1_floor.str();
  Json levels = Json::array();
  for (const auto& lvl : s.levels) {
    levels.push_back(Json{{"n", lvl.n.str()},
                          {"m", lvl.m.str()},
                          {"cond3_log", json_real(lvl.cond3_log)},
                          {"cond4_log", json_real(lvl.cond4_log)},
                          {"cond3_ok", lvl.cond3_ok},
                          {"cond4_ok", lvl.cond4_ok}});
  }
  j["levels"] = levels;
  if (!s.partial_reason.empty()) j["partial_reason"] = s.partial_reason;
  if (s.next_n) j["next_n"] = s.next_n->str();
  return j;
}

inline Json sample_to_json(const EtaSample& smp, int alphabet_size) {
  Json j;
  j["seed"] = smp.seed;
  Json anchors = Json::array();
  for (auto a : smp.anchors) anchors.push_back(a);
  j["A_prefix"] = anchors;
  j["word"] = smp.word.str(alphabet_size);
  Json hits = Json::array();
  for (auto h : smp.hits) hits.push_back(h);
  j["hits"] = hits;
  j["hit_set_equal"] = smp.hit_set_equal;
  j["depth_scanned"] = smp.depth_k;
  j["rejects"] = smp.rejects;
  return j;
}

inline Json mass_report_to_json(const MassBoundReport& rep) {
  Json j;
  j["max_ratio"] = json_real(rep.max_ratio);
  j["log_proof_constant"] = json_real(rep.log_proof_constant);
  j["min_block_measure_product"] = json_real(rep.min_block_measure_product);
  Json per_level = Json::array();
  for (double v : rep.per_level_max) per_level.push_back(json_real(v));
  j["per_level_max_ratio"] = per_level;
  j["per_level_nonincreasing"] = rep.per_level_nonincreasing;
  j["product_bound_lhs"] = json_real(rep.product_bound_lhs);
  j["product_bound_rhs"] = json_real(rep.product_bound_rhs);
  j["product_bound_ok"] = rep.product_bound_ok;
  Json trend = Json::array();
  for (const auto& et : rep.eta_trend) {
    trend.push_back(Json{{"k", et.k},
                         {"log_eta_estimate", json_real(et.log_eta_est)},
                         {"log_diam_pow_s", json_real(et.log_diam_s)},
                         {"ratio", json_real(et.ratio)},
                         {"exact", et.exact_branch}});
  }
  j["eta_trend"] = trend;
  Json points = Json::array();
  for (const auto& pt : rep.points) {
    points.push_back(Json{{"k", pt.k},
                          {"level", pt.level},
                          {"log_mu", json_real(pt.log_mu)},
                          {"inside_target_block", pt.inside_x_block},
                          {"ratio", json_real(pt.ratio)}});
  }
  j["mass_points"] = points;
  return j;
}

inline Json prop31_to_json(const TransferObstructionReport& rep) {
  Json j;
  j["d"] = json_real(rep.d);
  j["s"] = json_real(rep.s);
  j["alpha"] = json_real(rep.alpha);
  j["chi"] = json_real(rep.chi);
  j["d_kl"] = json_real(rep.d_kl);
  j["identity_rhs"] = json_real(rep.identity_rhs);
  j["identity_residual"] = json_real(rep.identity_residual);
  j["positivity"] = rep.positivity;
  j["tail_series_value"] = json_real(rep.tail_series_value);
  return j;
}

inline Json prop32_to_json(const WitnessReport& rep) {
  Json j;
  j["d"] = json_real(rep.d);
  j["s"] = json_real(rep.s);
  j["alpha"] = json_real(rep.alpha);
  j["delta"] = format_rational(rep.delta);
  Json lseq = Json::array();
  Json inequalities = Json::array();
  for (const auto& lvl : rep.levels) {
    lseq.push_back(lvl.ell);
    inequalities.push_back(Json{
        {"n", lvl.n},
        {"ell", lvl.ell},
        {"membership", Json{{"lhs", json_real(lvl.log_distance_hi)},
                            {"rhs", json_real(lvl.log_member_rhs)},
                            {"verdict", lvl.membership_ok}}},
        {"exclusion", Json{{"lhs", json_real(lvl.log_exclusion_lhs)},
                           {"rhs", json_real(lvl.log_psi)},
                           {"verdict", lvl.exclusion_ok}}},
        {"structure", lvl.structure_ok},
        {"exact_distance", lvl.exact_distance_used}});
  }
  j["l_seq"] = lseq;
  j["checked_levels"] = rep.levels.size();
  j["inequalities"] = inequalities;
  Json eon = Json::array();
  for (double v : rep.ell_over_n) eon.push_back(json_real(v));
  j["ell_over_n"] = eon;
  j["growth_ok"] = rep.growth_ok;
  j["pressure_slope"] = json_real(rep.pressure_slope);
  j["log_a1"] = json_real(rep.log_a1);
  j["slope_strictly_below"] = rep.slope_strictly_below;
  j["convexity_residual"] = json_real(rep.convexity_residual);
  j["all_verified"] = rep.all_verified;
  return j;
}

inline Json bad_dichotomy_to_json(const BadDichotomyReport& rep) {
  Json j;
  j["Q"] = rep.Q;
  j["s"] = json_real(rep.s);
  j["alpha"] = json_real(rep.alpha);
  j["growth_lo"] = json_real(rep.growth_lo);
  j["growth_hi"] = json_real(rep.growth_hi);
  switch (rep.verdict) {
    case SeriesVerdict::zero: j["verdict"] = "zero"; break;
    case SeriesVerdict::infinite: j["verdict"] = "infinite"; break;
    case SeriesVerdict::inconclusive: j["verdict"] = "inconclusive"; break;
  }
  j["heuristic"] = rep.heuristic;
  j["even_odd"] = Json{{"alpha_doubled", json_real(rep.alpha_even_odd)},
                       {"q1_factor", json_real(rep.q1_factor)},
                       {"odd_over_even_lo", json_real(rep.odd_over_even_lo)},
                       {"odd_over_even_hi", json_real(rep.odd_over_even_hi)}};
  if (!rep.required_precision.empty()) j["required_precision"] = rep.required_precision;
  return j;
}

// FNV-1a 64-bit content digest for run manifests (provenance, not security).
inline std::string fnv1a_digest(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace stt
