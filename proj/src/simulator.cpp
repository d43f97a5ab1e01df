#include "selgen/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "selgen/binom.hpp"

namespace selgen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string("WorldSpec: ") + what + " outside [0,1]");
  }
}

// 64-point Gauss-Legendre nodes/weights on [-1,1], built once by Newton
// iteration on the Legendre polynomial.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  GaussLegendre() {
    constexpr int n = 64;
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-15) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre gl;
  return gl;
}

// Integrates f over [a, b] with a fixed 64-node rule.
template <typename F>
double integrate(double a, double b, F&& f) {
  if (!(b > a)) return 0.0;
  const auto& gl = gauss_legendre();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    sum += gl.weights[i] * f(mid + half * gl.nodes[i]);
  }
  return sum * half;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

void WorldSpec::validate() const {
  check_prob(p_v, "p_v");
  check_prob(p_em_given_e1, "em_law.e1");
  check_prob(p_em_given_e0, "em_law.e0");
  if (curve == CurveKind::Constant) check_prob(curve_p, "constant curve p");
  if (curve == CurveKind::Identity && score_law != ScoreLaw::Uniform) {
    throw ConfigError("WorldSpec: identity curve requires the uniform score law");
  }
  if (score_law == ScoreLaw::Beta && !(score_a >= 1.0 && score_b >= 1.0)) {
    throw ConfigError("WorldSpec: beta score law needs a, b >= 1");
  }
  for (double p : {fe_a1, fe_b1, fe_a0, fe_b0}) {
    if (!(p > 0.0)) throw ConfigError("WorldSpec: beta f_e parameters must be > 0");
  }
  if (f_m2_noise_sd && !(*f_m2_noise_sd >= 0.0)) {
    throw ConfigError("WorldSpec: f_m2 noise sd must be >= 0");
  }
}

double WorldSpec::pi(double s) const {
  switch (curve) {
    case CurveKind::Identity:
      return s;
    case CurveKind::Logistic:
      return 1.0 / (1.0 + std::exp(-(curve_slope * s + curve_offset)));
    case CurveKind::Constant:
      return curve_p;
  }
  return 0.0;
}

namespace {

const char* score_law_name(ScoreLaw s) {
  return s == ScoreLaw::Uniform ? "uniform" : "beta";
}
const char* curve_name(CurveKind c) {
  switch (c) {
    case CurveKind::Identity: return "identity";
    case CurveKind::Logistic: return "logistic";
    case CurveKind::Constant: return "constant";
  }
  return "?";
}

}  // namespace

WorldSpec WorldSpec::from_json(const nlohmann::json& j) {
  WorldSpec w;
  try {
    if (j.contains("score_law")) {
      const auto& s = j.at("score_law");
      const std::string type = s.at("type").get<std::string>();
      if (type == "uniform") {
        w.score_law = ScoreLaw::Uniform;
      } else if (type == "beta") {
        w.score_law = ScoreLaw::Beta;
        w.score_a = s.at("a").get<double>();
        w.score_b = s.at("b").get<double>();
      } else {
        throw ConfigError("WorldSpec: unknown score law '" + type + "'");
      }
    }
    if (j.contains("calibration_curve")) {
      const auto& c = j.at("calibration_curve");
      const std::string type = c.at("type").get<std::string>();
      if (type == "identity") {
        w.curve = CurveKind::Identity;
      } else if (type == "logistic") {
        w.curve = CurveKind::Logistic;
        w.curve_slope = c.at("slope").get<double>();
        w.curve_offset = c.at("offset").get<double>();
      } else if (type == "constant") {
        w.curve = CurveKind::Constant;
        w.curve_p = c.at("p").get<double>();
      } else {
        throw ConfigError("WorldSpec: unknown calibration curve '" + type + "'");
      }
    }
    if (j.contains("entail_score_law")) {
      const auto& e = j.at("entail_score_law");
      w.fe_a1 = e.at("e1").at("a").get<double>();
      w.fe_b1 = e.at("e1").at("b").get<double>();
      w.fe_a0 = e.at("e0").at("a").get<double>();
      w.fe_b0 = e.at("e0").at("b").get<double>();
    }
    if (j.contains("f_m2_law") && !j.at("f_m2_law").is_null()) {
      w.f_m2_noise_sd = j.at("f_m2_law").at("noise_sd").get<double>();
    }
    if (j.contains("p_v")) w.p_v = j.at("p_v").get<double>();
    if (j.contains("em_law")) {
      w.p_em_given_e1 = j.at("em_law").at("p_em_given_e1").get<double>();
      w.p_em_given_e0 = j.at("em_law").at("p_em_given_e0").get<double>();
    }
    if (j.contains("seed")) w.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("WorldSpec: malformed JSON: ") + e.what());
  }
  w.validate();
  return w;
}

nlohmann::json WorldSpec::to_json() const {
  nlohmann::json j;
  j["score_law"]["type"] = score_law_name(score_law);
  if (score_law == ScoreLaw::Beta) {
    j["score_law"]["a"] = score_a;
    j["score_law"]["b"] = score_b;
  }
  j["calibration_curve"]["type"] = curve_name(curve);
  if (curve == CurveKind::Logistic) {
    j["calibration_curve"]["slope"] = curve_slope;
    j["calibration_curve"]["offset"] = curve_offset;
  } else if (curve == CurveKind::Constant) {
    j["calibration_curve"]["p"] = curve_p;
  }
  j["entail_score_law"] = {{"e1", {{"a", fe_a1}, {"b", fe_b1}}},
                           {"e0", {{"a", fe_a0}, {"b", fe_b0}}}};
  if (f_m2_noise_sd) j["f_m2_law"] = {{"noise_sd", *f_m2_noise_sd}};
  j["p_v"] = p_v;
  j["em_law"] = {{"p_em_given_e1", p_em_given_e1},
                 {"p_em_given_e0", p_em_given_e0}};
  j["seed"] = seed;
  return j;
}

namespace {

// Fixed per-record draw order keeps datasets byte-reproducible.
ScoredRecord sample_record(const WorldSpec& w, Rng& rng, std::int64_t idx) {
  ScoredRecord r;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sim-%08lld", static_cast<long long>(idx));
  r.id = buf;
  r.f_m1 = w.score_law == ScoreLaw::Uniform ? rng.uniform01()
                                            : rng.beta(w.score_a, w.score_b);
  const int e = rng.bernoulli(w.pi(r.f_m1)) ? 1 : 0;
  r.e = e;
  r.f_e = e == 1 ? rng.beta(w.fe_a1, w.fe_b1) : rng.beta(w.fe_a0, w.fe_b0);
  if (w.f_m2_noise_sd) {
    const double sd = *w.f_m2_noise_sd;
    const double noise = sd > 0.0 ? sd * rng.normal() : 0.0;
    r.f_m2 = std::clamp(w.pi(r.f_m1) + noise, 0.0, 1.0);
  }
  r.em = rng.bernoulli(e == 1 ? w.p_em_given_e1 : w.p_em_given_e0) ? 1 : 0;
  r.v = rng.bernoulli(w.p_v) ? 1 : 0;
  return r;
}

}  // namespace

Dataset sample_dataset(const WorldSpec& w, std::int64_t n, Rng& rng) {
  w.validate();
  if (n < 0) throw ConfigError("sample_dataset: n must be >= 0");
  Dataset ds;
  ds.provenance = "simulated";
  ds.records.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    ds.records.push_back(sample_record(w, rng, i));
  }
  return ds;
}

Dataset sample_dataset(const WorldSpec& w, std::int64_t n) {
  Rng rng(w.seed);
  return sample_dataset(w, n, rng);
}

Dataset sample_split(const WorldSpec& w, std::int64_t n_e, std::int64_t n_u,
                     Rng& rng) {
  w.validate();
  Dataset ds;
  ds.provenance = "simulated-split";
  ds.records.reserve(static_cast<std::size_t>(n_e + n_u));
  for (std::int64_t i = 0; i < n_e + n_u; ++i) {
    ScoredRecord r = sample_record(w, rng, i);
    r.v = i < n_e ? 1 : 0;
    ds.records.push_back(std::move(r));
  }
  return ds;
}

TrueRisk::TrueRisk(const WorldSpec& w) : w_(w) { w_.validate(); }

namespace {

double score_density(const WorldSpec& w, double s) {
  if (w.score_law == ScoreLaw::Uniform) return 1.0;
  const double logb = std::lgamma(w.score_a) + std::lgamma(w.score_b) -
                      std::lgamma(w.score_a + w.score_b);
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return std::exp((w.score_a - 1.0) * std::log(s) +
                  (w.score_b - 1.0) * std::log(1.0 - s) - logb);
}

// P(f_m2 >= tau2 | f_m1 = s); analytic normal tail of the clamped transform.
double fm2_tail(const WorldSpec& w, double s, double tau2) {
  if (!w.f_m2_noise_sd.has_value()) {
    throw UndefinedRiskError("selector references f_m2 but the world has no f_m2 law");
  }
  if (tau2 <= 0.0) return 1.0;
  if (tau2 > 1.0) return 0.0;
  const double sd = *w.f_m2_noise_sd;
  const double g = w.pi(s);
  if (sd == 0.0) return g >= tau2 ? 1.0 : 0.0;
  return normal_upper_tail((tau2 - g) / sd);
}

struct SelectorShape {
  double tau1 = -kInf;        // f_m1 threshold (integration lower limit)
  std::optional<double> tau2; // f_m2 threshold
};

SelectorShape shape_of(const Selector& sel) {
  sel.validate();
  SelectorShape sh;
  for (const auto& t : sel.terms) {
    if (t.key == ScoreKey::FM1) {
      sh.tau1 = t.threshold;
    } else {
      sh.tau2 = t.threshold;
    }
  }
  return sh;
}

// Integrals of g(s) * A(s) * q(s) over the acceptance region, where A is
// the acceptance probability given the score.
template <typename G>
double accept_integral(const WorldSpec& w, const SelectorShape& sh, G&& g) {
  const double lo = std::max(0.0, sh.tau1);
  if (lo > 1.0) return 0.0;
  return integrate(lo, 1.0, [&](double s) {
    double a = 1.0;
    if (sh.tau2) a *= fm2_tail(w, s, *sh.tau2);
    return g(s) * a * score_density(w, s);
  });
}

}  // namespace

double TrueRisk::acceptance_mass(const Selector& sel) const {
  const SelectorShape sh = shape_of(sel);
  return accept_integral(w_, sh, [](double) { return 1.0; });
}

double TrueRisk::fdr_e_at(const Selector& sel) const {
  const SelectorShape sh = shape_of(sel);
  const double mass = accept_integral(w_, sh, [](double) { return 1.0; });
  if (mass < 1e-12) {
    throw UndefinedRiskError("selector accepts a zero-probability region");
  }
  const double bad =
      accept_integral(w_, sh, [&](double s) { return 1.0 - w_.pi(s); });
  return bad / mass;
}

double TrueRisk::fdr_em_at(const Selector& sel) const {
  const SelectorShape sh = shape_of(sel);
  const double mass = accept_integral(w_, sh, [](double) { return 1.0; });
  if (mass < 1e-12) {
    throw UndefinedRiskError("selector accepts a zero-probability region");
  }
  const double bad = accept_integral(w_, sh, [&](double s) {
    const double p1 = w_.pi(s);
    return p1 * (1.0 - w_.p_em_given_e1) + (1.0 - p1) * (1.0 - w_.p_em_given_e0);
  });
  return bad / mass;
}

double TrueRisk::fer_at(double tau_e) const {
  if (tau_e == kInf) return 0.0;
  const double p0 = p_e0();
  return p0 * (1.0 - beta_cdf(std::clamp(tau_e, 0.0, 1.0), w_.fe_a0, w_.fe_b0));
}

double TrueRisk::ner_at(double tau_e, const Selector& sel) const {
  const SelectorShape sh = shape_of(sel);
  const double mass = accept_integral(w_, sh, [](double) { return 1.0; });
  if (mass < 1e-12) {
    throw UndefinedRiskError("selector accepts a zero-probability region");
  }
  if (tau_e == kInf) return 1.0;
  const double t = std::clamp(tau_e, 0.0, 1.0);
  const double cdf1 = beta_cdf(t, w_.fe_a1, w_.fe_b1);
  const double cdf0 = beta_cdf(t, w_.fe_a0, w_.fe_b0);
  const double ner = accept_integral(w_, sh, [&](double s) {
    const double p1 = w_.pi(s);
    return p1 * cdf1 + (1.0 - p1) * cdf0;
  });
  return ner / mass;
}

double TrueRisk::p_e0() const {
  return integrate(0.0, 1.0, [&](double s) {
    return (1.0 - w_.pi(s)) * score_density(w_, s);
  });
}

double true_fdr_e(const WorldSpec& w, const Selector& sel) {
  return TrueRisk(w).fdr_e_at(sel);
}

PluginEstimate plugin_fdr_e(const WorldSpec& w, const Selector& sel,
                            std::int64_t n_samples, std::uint64_t seed) {
  sel.validate();
  Rng rng = Rng::for_trial(seed, 0x706c7567);
  std::int64_t selected = 0;
  std::int64_t bad = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const ScoredRecord r = sample_record(w, rng, i);
    bool accept = true;
    for (const auto& t : sel.terms) {
      if (get_score(r, t.key) < t.threshold) {
        accept = false;
        break;
      }
    }
    if (!accept) continue;
    ++selected;
    if (*r.e == 0) ++bad;
  }
  PluginEstimate est;
  est.n_samples = n_samples;
  est.n_selected = selected;
  if (selected == 0) {
    throw UndefinedRiskError("plugin_fdr_e: selector accepted no samples");
  }
  est.value = static_cast<double>(bad) / static_cast<double>(selected);
  est.std_error =
      std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(selected));
  return est;
}

std::vector<std::pair<double, double>> lemma4_curve(
    const WorldSpec& w, const std::vector<double>& taus) {
  w.validate();
  if (w.curve != CurveKind::Identity) {
    throw ConfigError("lemma4_curve: requires the identity-calibrated world");
  }
  TrueRisk risk(w);
  std::vector<std::pair<double, double>> curve;
  curve.reserve(taus.size());
  for (double tau : taus) {
    curve.emplace_back(tau, risk.fdr_e_at(single_selector(ScoreKey::FM1, tau)));
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].second > curve[i - 1].second + 1e-12) {
      throw std::logic_error("lemma4_curve: FDR-E increased along the grid");
    }
  }
  return curve;
}

Claim claim_from_string(const std::string& s) {
  if (s == "fer") return Claim::Fer;
  if (s == "u_ssl") return Claim::USsl;
  if (s == "theorem1") return Claim::Theorem1;
  if (s == "theorem2") return Claim::Theorem2;
  throw ConfigError("unknown claim: " + s);
}

const char* to_string(Claim c) {
  switch (c) {
    case Claim::Fer: return "fer";
    case Claim::USsl: return "u_ssl";
    case Claim::Theorem1: return "theorem1";
    case Claim::Theorem2: return "theorem2";
  }
  return "?";
}

nlohmann::json AuditReport::to_json() const {
  return nlohmann::json{
      {"claim", claim},         {"trials", trials},
      {"violations", violations}, {"frequency", frequency},
      {"ci_low", ci_low},       {"ci_high", ci_high},
      {"pass", pass},           {"budget_level", budget_level},
      {"pass_threshold", pass_threshold}, {"params", params}};
}

namespace {

AuditReport finish_report(Claim claim, std::int64_t trials,
                          std::int64_t violations, double level,
                          nlohmann::json params) {
  AuditReport rep;
  rep.claim = to_string(claim);
  rep.trials = trials;
  rep.violations = violations;
  rep.frequency = static_cast<double>(violations) / static_cast<double>(trials);
  rep.ci_low = l_binom(violations, trials, 0.025);
  rep.ci_high = u_binom(violations, trials, 0.025);
  rep.budget_level = level;
  const double t = static_cast<double>(trials);
  rep.pass_threshold = static_cast<std::int64_t>(
      std::ceil(level * t + 3.0 * std::sqrt(t * level * (1.0 - level))));
  rep.pass = violations <= rep.pass_threshold;
  rep.params = std::move(params);
  return rep;
}

}  // namespace

AuditReport mc_verify(Claim claim, const WorldSpec& w, const AuditParams& p) {
  w.validate();
  if (p.trials < 1) throw ConfigError("mc_verify: trials must be >= 1");
  TrueRisk risk(w);
  std::int64_t violations = 0;
  nlohmann::json params;
  params["n_e"] = p.n_e;
  params["n_u"] = p.n_u;

  switch (claim) {
    case Claim::Fer: {
      params["eps_e"] = p.eps_e;
      params["delta_e"] = p.delta_e;
      for (std::int64_t t = 0; t < p.trials; ++t) {
        Rng rng = Rng::for_trial(w.seed, static_cast<std::uint64_t>(t));
        const Dataset ds = sample_split(w, p.n_e, 0, rng);
        const RecordRefs z_e = labeled_refs(ds);
        const EntailmentSetParam param =
            learn_entailment_set(z_e, p.eps_e, p.delta_e);
        if (risk.fer_at(param.tau_e) > p.eps_e) ++violations;
      }
      return finish_report(claim, p.trials, violations, p.delta_e,
                           std::move(params));
    }
    case Claim::USsl: {
      params["eps_e"] = p.eps_e;
      params["delta_e"] = p.delta_e;
      params["delta_s"] = p.delta_s;
      // Budgets actually consumed by compute_u_ssl: delta_e (split between
      // the entailment set and the FNER bound) plus delta_s/2 for the NER.
      const double level = p.delta_e + p.delta_s / 2.0;
      const double truth = risk.p_e0();
      for (std::int64_t t = 0; t < p.trials; ++t) {
        Rng rng = Rng::for_trial(w.seed, static_cast<std::uint64_t>(t));
        const Dataset ds = sample_split(w, p.n_e, p.n_u, rng);
        const SslBound b = compute_u_ssl(labeled_refs(ds), unlabeled_refs(ds),
                                         p.delta_s, p.eps_e, p.delta_e);
        if (truth > b.u_ssl) ++violations;
      }
      return finish_report(claim, p.trials, violations, level,
                           std::move(params));
    }
    case Claim::Theorem1: {
      p.budget.validate();
      params["budget"] = {{"eps_s", p.budget.eps_s},
                          {"delta_s", p.budget.delta_s},
                          {"delta_e", p.budget.delta_e},
                          {"delta_w", p.budget.delta_w},
                          {"q", p.budget.q}};
      const double level = p.budget.delta_s + p.budget.delta_e + p.budget.delta_w;
      for (std::int64_t t = 0; t < p.trials; ++t) {
        Rng rng = Rng::for_trial(w.seed, static_cast<std::uint64_t>(t));
        const Dataset ds = sample_split(w, p.n_e, p.n_u, rng);
        const CertifiedResult res =
            sgen_semi_ms(labeled_refs(ds), unlabeled_refs(ds), p.budget);
        try {
          if (risk.fdr_e_at(res.selector) > res.u_hat) ++violations;
        } catch (const UndefinedRiskError&) {
          // Accept-nothing selector: the conditional guarantee is vacuous.
        }
      }
      return finish_report(claim, p.trials, violations, level,
                           std::move(params));
    }
    case Claim::Theorem2: {
      const double theta_star = risk.p_e0();
      params["theta_star"] = theta_star;
      params["delta"] = p.delta;
      params["n"] = p.n_e;
      std::vector<double> bound_by_k(static_cast<std::size_t>(p.n_e) + 1, -1.0);
      for (std::int64_t t = 0; t < p.trials; ++t) {
        Rng rng = Rng::for_trial(w.seed, static_cast<std::uint64_t>(t));
        std::int64_t k = 0;
        for (std::int64_t i = 0; i < p.n_e; ++i) {
          if (rng.bernoulli(theta_star)) ++k;
        }
        double& cached = bound_by_k[static_cast<std::size_t>(k)];
        if (cached < 0.0) cached = u_binom(k, p.n_e, p.delta);
        if (theta_star > cached) ++violations;
      }
      return finish_report(claim, p.trials, violations, p.delta,
                           std::move(params));
    }
  }
  throw ConfigError("mc_verify: unreachable claim");
}

}  // namespace selgen
