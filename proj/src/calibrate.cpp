#include "selgen/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "search_internal.hpp"

namespace selgen {

const char* to_string(ScoreKey k) {
  return k == ScoreKey::FM1 ? "f_m1" : "f_m2";
}

ScoreKey score_key_from_string(const std::string& s) {
  if (s == "f_m1") return ScoreKey::FM1;
  if (s == "f_m2") return ScoreKey::FM2;
  throw std::invalid_argument("unknown score key: " + s);
}

double get_score(const ScoredRecord& r, ScoreKey key) {
  if (key == ScoreKey::FM1) return r.f_m1;
  if (!r.f_m2.has_value()) {
    throw std::invalid_argument("record '" + r.id + "' has no f_m2 score");
  }
  return *r.f_m2;
}

void Selector::validate() const {
  if (terms.empty() || terms.size() > 2) {
    throw std::invalid_argument("Selector: needs 1 or 2 terms");
  }
  if (terms.size() == 2 && terms[0].key == terms[1].key) {
    throw std::invalid_argument("Selector: term score keys must be distinct");
  }
}

bool Selector::references(ScoreKey key) const {
  for (const auto& t : terms) {
    if (t.key == key) return true;
  }
  return false;
}

Selector single_selector(ScoreKey key, double threshold) {
  Selector s;
  s.terms.push_back({key, threshold});
  return s;
}

Selector double_selector(double tau_m1, double tau_m2) {
  Selector s;
  s.terms.push_back({ScoreKey::FM1, tau_m1});
  s.terms.push_back({ScoreKey::FM2, tau_m2});
  return s;
}

const char* to_string(Bounded b) {
  return b == Bounded::Success ? "Success" : "Fail";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RecordRefs sorted_by(RecordRefs refs, ScoreKey key) {
  std::stable_sort(refs.begin(), refs.end(),
                   [key](const ScoredRecord* a, const ScoredRecord* b) {
                     return get_score(*a, key) < get_score(*b, key);
                   });
  return refs;
}

void require_score(const RecordRefs& refs, ScoreKey key) {
  for (const ScoredRecord* r : refs) (void)get_score(*r, key);
}

CertifiedResult vacuous_result(Selector sel, const char* used) {
  CertifiedResult res;
  res.selector = std::move(sel);
  res.u_hat = 1.0;
  res.bounded = Bounded::Fail;
  res.score_set_used = used;
  return res;
}

}  // namespace

CertifiedResult sgen_semi_single(ScoreKey key, const RecordRefs& z_e,
                                 const RecordRefs& z_u, const RiskBudget& b) {
  b.validate();
  require_score(z_e, key);
  require_score(z_u, key);

  RecordRefs union_refs = z_e;
  union_refs.insert(union_refs.end(), z_u.begin(), z_u.end());
  const std::size_t n = union_refs.size();
  if (n == 0) return vacuous_result(single_selector(key, kInf), to_string(key));

  const int iters = std::max(1, ceil_log2(n));
  const double ds = b.delta_s / iters;
  const double de = b.delta_e / iters;
  const double dw = b.delta_w / iters;

  CertifiedResult res;
  res.score_set_used = to_string(key);
  res.iterations = iters;
  res.per_eval_delta_s = ds;
  res.per_eval_delta_e = de;
  res.per_eval_delta_w = dw;
  res.per_eval_q = b.q;

  const RecordRefs sorted = sorted_by(union_refs, key);
  auto evaluate = [&](std::size_t idx1, int it) {
    const double tau = get_score(*sorted[idx1 - 1], key);
    RecordRefs fe, fu;
    for (const ScoredRecord* r : z_e) {
      if (get_score(*r, key) >= tau) fe.push_back(r);
    }
    for (const ScoredRecord* r : z_u) {
      if (get_score(*r, key) >= tau) fu.push_back(r);
    }
    const ComposedBound cb = fdr_e_bound(fe, fu, ds, b.q, de, dw);
    CandidateEval ev;
    ev.iter1 = it;
    ev.tau1 = tau;
    ev.bound = cb.u;
    ev.feasible = cb.u <= b.eps_s;
    ev.n_selected = static_cast<std::int64_t>(fe.size() + fu.size());
    res.trace.push_back(ev);
    return cb.u;
  };

  const auto st = detail::bisect_candidates(n, iters, b.eps_s, evaluate);
  if (st.any_feasible) {
    res.bounded = Bounded::Success;
    res.u_hat = st.last_feasible_bound;
    double tau = kInf;
    for (const auto& ev : res.trace) {
      if (ev.feasible) tau = ev.tau1;  // latest feasible
    }
    res.selector = single_selector(key, tau);
  } else {
    res.bounded = Bounded::Fail;
    res.u_hat = st.min_bound;
    double best = kInf;
    double best_tau = kInf;
    for (const auto& ev : res.trace) {
      if (ev.bound <= best) {  // latest minimum, as in the min tracking
        best = ev.bound;
        best_tau = ev.tau1;
      }
    }
    res.selector = single_selector(key, best_tau);
  }
  return res;
}

CertifiedResult sgen_semi_double(const RecordRefs& z_e, const RecordRefs& z_u,
                                 const RiskBudget& b) {
  b.validate();
  require_score(z_e, ScoreKey::FM2);
  require_score(z_u, ScoreKey::FM2);

  RecordRefs union_refs = z_e;
  union_refs.insert(union_refs.end(), z_u.begin(), z_u.end());
  const std::size_t n = union_refs.size();
  if (n == 0) return vacuous_result(double_selector(kInf, kInf), "f_m1+f_m2");

  const int iters = std::max(1, ceil_log2(n));
  const double ds = b.delta_s / (static_cast<double>(iters) * iters);
  const double de = b.delta_e / (static_cast<double>(iters) * iters);
  const double dw = b.delta_w / (static_cast<double>(iters) * iters);

  CertifiedResult res;
  res.score_set_used = "f_m1+f_m2";
  res.iterations = iters;
  res.per_eval_delta_s = ds;
  res.per_eval_delta_e = de;
  res.per_eval_delta_w = dw;
  res.per_eval_q = b.q;

  const RecordRefs sorted1 = sorted_by(union_refs, ScoreKey::FM1);
  const RecordRefs sorted2 = sorted_by(union_refs, ScoreKey::FM2);

  double u_min = kInf;
  std::pair<double, double> tau_min{kInf, kInf};
  bool any_feasible = false;
  double last_feasible_bound = 1.0;
  std::pair<double, double> last_feasible_tau{kInf, kInf};

  std::size_t lo1 = 0, hi1 = n;
  for (int i = 1; i <= iters; ++i) {
    const std::size_t mid1 = (lo1 + hi1 + 1) / 2;
    const double tau1 = get_score(*sorted1[mid1 - 1], ScoreKey::FM1);

    double u_min_i = kInf;
    std::pair<double, double> tau_min_i{tau1, kInf};
    auto evaluate = [&](std::size_t idx1, int j) {
      const double tau2 = get_score(*sorted2[idx1 - 1], ScoreKey::FM2);
      RecordRefs fe, fu;
      for (const ScoredRecord* r : z_e) {
        if (r->f_m1 >= tau1 && *r->f_m2 >= tau2) fe.push_back(r);
      }
      for (const ScoredRecord* r : z_u) {
        if (r->f_m1 >= tau1 && *r->f_m2 >= tau2) fu.push_back(r);
      }
      const ComposedBound cb = fdr_e_bound(fe, fu, ds, b.q, de, dw);
      CandidateEval ev;
      ev.iter1 = i;
      ev.iter2 = j;
      ev.tau1 = tau1;
      ev.tau2 = tau2;
      ev.bound = cb.u;
      ev.feasible = cb.u <= b.eps_s;
      ev.n_selected = static_cast<std::int64_t>(fe.size() + fu.size());
      res.trace.push_back(ev);
      if (cb.u <= u_min_i) {
        u_min_i = cb.u;
        tau_min_i = {tau1, tau2};
      }
      if (cb.u <= b.eps_s) {
        last_feasible_bound = cb.u;
        last_feasible_tau = {tau1, tau2};
      }
      return cb.u;
    };
    const auto inner = detail::bisect_candidates(n, iters, b.eps_s, evaluate);
    any_feasible = any_feasible || inner.any_feasible;

    if (u_min_i <= u_min) {
      u_min = u_min_i;
      tau_min = tau_min_i;
    }
    if (i != iters) {
      if (u_min_i <= b.eps_s) {
        hi1 = mid1;
      } else {
        lo1 = mid1;
      }
    }
  }

  if (any_feasible) {
    res.bounded = Bounded::Success;
    res.u_hat = last_feasible_bound;
    res.selector = double_selector(last_feasible_tau.first,
                                   last_feasible_tau.second);
  } else {
    res.bounded = Bounded::Fail;
    res.u_hat = u_min;
    res.selector = double_selector(tau_min.first, tau_min.second);
  }
  return res;
}

CertifiedResult sgen_semi_ms(const RecordRefs& z_e, const RecordRefs& z_u,
                             const RiskBudget& b) {
  b.validate();
  RiskBudget third = b;
  third.delta_s = b.delta_s / 3.0;
  third.delta_e = b.delta_e / 3.0;
  third.delta_w = b.delta_w / 3.0;

  std::vector<CertifiedResult> branches;
  branches.push_back(sgen_semi_single(ScoreKey::FM1, z_e, z_u, third));
  try {
    branches.push_back(sgen_semi_single(ScoreKey::FM2, z_e, z_u, third));
  } catch (const std::invalid_argument&) {
    branches.push_back(vacuous_result(single_selector(ScoreKey::FM2, kInf),
                                      "f_m2"));
  }
  try {
    branches.push_back(sgen_semi_double(z_e, z_u, third));
  } catch (const std::invalid_argument&) {
    branches.push_back(vacuous_result(double_selector(kInf, kInf),
                                      "f_m1+f_m2"));
  }

  const CertifiedResult* pick = nullptr;
  for (const auto& br : branches) {  // argmax u_hat among Successes
    if (br.bounded != Bounded::Success) continue;
    if (pick == nullptr || br.u_hat > pick->u_hat) pick = &br;
  }
  if (pick == nullptr) {
    for (const auto& br : branches) {  // argmin u_hat among Fails
      if (pick == nullptr || br.u_hat < pick->u_hat) pick = &br;
    }
  }
  return *pick;
}

}  // namespace selgen
