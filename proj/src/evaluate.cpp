#include "selgen/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selgen/rng.hpp"

namespace selgen {

Decision apply_selector(const Selector& sel, const ScoredRecord& r) {
  sel.validate();
  for (const auto& t : sel.terms) {
    if (get_score(r, t.key) < t.threshold) return Decision::Idk;
  }
  return Decision::Accept;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["n_test"] = n_test;
  j["n_selected"] = n_selected;
  j["n_false_selected"] = n_false_selected;
  j["fdr_e_defined"] = fdr_e_defined;
  j["fdr_e"] = fdr_e_defined ? nlohmann::json(fdr_e) : nlohmann::json();
  j["efficiency"] = efficiency;
  if (!method.empty()) j["method"] = method;
  if (!bounded.empty()) {
    j["bounded"] = bounded;
    j["u_hat"] = u_hat;
  }
  return j;
}

EvalReport evaluate(const Selector& sel, const Dataset& test) {
  sel.validate();
  EvalReport rep;
  rep.n_test = static_cast<std::int64_t>(test.records.size());
  for (const auto& r : test.records) {
    if (!r.e.has_value()) {
      throw ValidationError("evaluate: unlabeled test record '" + r.id + "'");
    }
    if (apply_selector(sel, r) == Decision::Accept) {
      ++rep.n_selected;
      if (*r.e == 0) ++rep.n_false_selected;
    }
  }
  rep.efficiency = rep.n_test == 0 ? 0.0
                                   : static_cast<double>(rep.n_selected) /
                                         static_cast<double>(rep.n_test);
  if (rep.n_selected > 0) {
    rep.fdr_e_defined = true;
    rep.fdr_e = static_cast<double>(rep.n_false_selected) /
                static_cast<double>(rep.n_selected);
  }
  return rep;
}

Method method_from_string(const std::string& s) {
  if (s == "semi-ms") return Method::SemiMs;
  if (s == "semi-single") return Method::SemiSingle;
  if (s == "semi-double") return Method::SemiDouble;
  if (s == "sup") return Method::Sup;
  if (s == "psl") return Method::Psl;
  if (s == "em") return Method::Em;
  throw ValidationError("unknown method: " + s);
}

const char* to_string(Method m) {
  switch (m) {
    case Method::SemiMs: return "semi-ms";
    case Method::SemiSingle: return "semi-single";
    case Method::SemiDouble: return "semi-double";
    case Method::Sup: return "sup";
    case Method::Psl: return "psl";
    case Method::Em: return "em";
  }
  return "?";
}

CertifiedResult run_method(Method m, ScoreKey key, const RecordRefs& z_e,
                           const RecordRefs& z_u, const RiskBudget& budget,
                           const PslConfig& psl) {
  const double delta = budget.delta_s + budget.delta_e + budget.delta_w;
  switch (m) {
    case Method::SemiMs:
      return sgen_semi_ms(z_e, z_u, budget);
    case Method::SemiSingle:
      return sgen_semi_single(key, z_e, z_u, budget);
    case Method::SemiDouble:
      return sgen_semi_double(z_e, z_u, budget);
    case Method::Sup:
      return sgen_sup(key, z_e, budget.eps_s, delta);
    case Method::Psl:
      return sgen_psl(key, z_e, z_u, budget.eps_s, delta, psl);
    case Method::Em: {
      RecordRefs all = z_e;
      all.insert(all.end(), z_u.begin(), z_u.end());
      return sgen_em(key, all, budget.eps_s, delta);
    }
  }
  throw ValidationError("run_method: unreachable");
}

namespace {

struct Quantiles {
  double q_lo, q25, median, q75, q_hi, mean;
};

Quantiles quantiles_of(std::vector<double> xs, double delta) {
  Quantiles q{0, 0, 0, 0, 0, 0};
  if (xs.empty()) return q;
  std::sort(xs.begin(), xs.end());
  auto at = [&](double p) {
    const double idx = p * (xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(idx));
    const auto hi = static_cast<std::size_t>(std::ceil(idx));
    const double w = idx - lo;
    return (1.0 - w) * xs[lo] + w * xs[hi];
  };
  q.q_lo = at(delta);
  q.q25 = at(0.25);
  q.median = at(0.5);
  q.q75 = at(0.75);
  q.q_hi = at(1.0 - delta);
  double sum = 0.0;
  for (double x : xs) sum += x;
  q.mean = sum / static_cast<double>(xs.size());
  return q;
}

}  // namespace

nlohmann::json SplitSummary::to_json() const {
  return nlohmann::json{
      {"delta", delta},
      {"fdr_e",
       {{"q_delta", fdr_q_lo}, {"q25", fdr_q25}, {"median", fdr_median},
        {"q75", fdr_q75}, {"q_1_minus_delta", fdr_q_hi}, {"mean", fdr_mean}}},
      {"efficiency",
       {{"q_delta", eff_q_lo}, {"q25", eff_q25}, {"median", eff_median},
        {"q75", eff_q75}, {"q_1_minus_delta", eff_q_hi}, {"mean", eff_mean}}},
      {"n_undefined_fdr_e", n_undefined}};
}

std::vector<EvalReport> repeated_splits(const Dataset& ds,
                                        const RepeatedSplitConfig& cfg,
                                        SplitSummary* summary) {
  if (cfg.n_splits < 1) {
    throw ValidationError("repeated_splits: n_splits must be >= 1");
  }
  cfg.budget.validate();
  std::vector<EvalReport> reports;
  reports.reserve(static_cast<std::size_t>(cfg.n_splits));
  const std::size_t n = ds.records.size();
  const auto n_cal = static_cast<std::size_t>(
      std::llround(cfg.calib_ratio * static_cast<double>(n)));

  for (int split = 0; split < cfg.n_splits; ++split) {
    Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(split));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.bounded(i)]);
    }
    Dataset cal, test;
    cal.provenance = ds.provenance;
    test.provenance = ds.provenance;
    for (std::size_t i = 0; i < n; ++i) {
      (i < n_cal ? cal : test).records.push_back(ds.records[idx[i]]);
    }
    if (cfg.labeled_fraction < 1.0) {
      cal = split_labeled_fraction(cal, cfg.labeled_fraction,
                                   rng.next_u64());
    }
    const CertifiedResult res =
        run_method(cfg.method, cfg.score_key, labeled_refs(cal),
                   unlabeled_refs(cal), cfg.budget, cfg.psl);
    EvalReport rep = evaluate(res.selector, test);
    rep.method = to_string(cfg.method);
    rep.bounded = to_string(res.bounded);
    rep.u_hat = res.u_hat;
    reports.push_back(std::move(rep));
  }

  if (summary != nullptr) {
    const double delta =
        cfg.budget.delta_s + cfg.budget.delta_e + cfg.budget.delta_w;
    std::vector<double> fdrs, effs;
    std::int64_t undefined = 0;
    for (const auto& r : reports) {
      effs.push_back(r.efficiency);
      if (r.fdr_e_defined) {
        fdrs.push_back(r.fdr_e);
      } else {
        ++undefined;
      }
    }
    const Quantiles fq = quantiles_of(std::move(fdrs), delta);
    const Quantiles eq = quantiles_of(std::move(effs), delta);
    summary->delta = delta;
    summary->fdr_q_lo = fq.q_lo;
    summary->fdr_q25 = fq.q25;
    summary->fdr_median = fq.median;
    summary->fdr_q75 = fq.q75;
    summary->fdr_q_hi = fq.q_hi;
    summary->fdr_mean = fq.mean;
    summary->eff_q_lo = eq.q_lo;
    summary->eff_q25 = eq.q25;
    summary->eff_median = eq.median;
    summary->eff_q75 = eq.q75;
    summary->eff_q_hi = eq.q_hi;
    summary->eff_mean = eq.mean;
    summary->n_undefined = undefined;
  }
  return reports;
}

std::string splits_to_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "split,method,fdr_e,efficiency\n";
  out.precision(17);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out << i << ',' << r.method << ',';
    if (r.fdr_e_defined) {
      out << r.fdr_e;
    } else {
      out << "NA";
    }
    out << ',' << r.efficiency << '\n';
  }
  return out.str();
}

}  // namespace selgen
