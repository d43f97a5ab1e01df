#include "selgen/baselines.hpp"

#include <algorithm>

#include "selgen/binom.hpp"
#include "search_internal.hpp"

namespace selgen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared search core of the three baselines: binary search over sorted
// (score, loss) pairs, exact binomial bound over the selected suffix.
CertifiedResult search_binomial(ScoreKey key,
                                std::vector<std::pair<double, int>> items,
                                double eps, double delta) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("search_binomial: eps outside (0,1]");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("search_binomial: delta outside (0,1)");
  }
  CertifiedResult res;
  res.score_set_used = to_string(key);
  const std::size_t n = items.size();
  if (n == 0) {
    res.selector = single_selector(key, kInf);
    return res;
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const int iters = std::max(1, ceil_log2(n));
  const double d = delta / iters;
  res.iterations = iters;
  res.per_eval_delta = d;

  std::vector<std::int64_t> suffix_loss(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) {
    suffix_loss[i] = suffix_loss[i + 1] + items[i].second;
  }

  auto evaluate = [&](std::size_t idx1, int it) {
    const double tau = items[idx1 - 1].first;
    const auto first = std::lower_bound(
        items.begin(), items.end(), tau,
        [](const auto& a, double t) { return a.first < t; });
    const auto pos = static_cast<std::size_t>(first - items.begin());
    const auto selected = static_cast<std::int64_t>(n - pos);
    const std::int64_t k = suffix_loss[pos];
    const double u = u_binom(k, selected, d);
    CandidateEval ev;
    ev.iter1 = it;
    ev.tau1 = tau;
    ev.bound = u;
    ev.feasible = u <= eps;
    ev.n_selected = selected;
    ev.loss_count = k;
    res.trace.push_back(ev);
    return u;
  };

  const auto st = detail::bisect_candidates(n, iters, eps, evaluate);
  if (st.any_feasible) {
    res.bounded = Bounded::Success;
    res.u_hat = st.last_feasible_bound;
    double tau = kInf;
    for (const auto& ev : res.trace) {
      if (ev.feasible) tau = ev.tau1;
    }
    res.selector = single_selector(key, tau);
  } else {
    res.bounded = Bounded::Fail;
    res.u_hat = st.min_bound;
    double best = kInf;
    double best_tau = kInf;
    for (const auto& ev : res.trace) {
      if (ev.bound <= best) {
        best = ev.bound;
        best_tau = ev.tau1;
      }
    }
    res.selector = single_selector(key, best_tau);
  }
  return res;
}

}  // namespace

CertifiedResult sgen_sup(ScoreKey key, const RecordRefs& z_e, double eps,
                         double delta) {
  std::vector<std::pair<double, int>> items;
  items.reserve(z_e.size());
  for (const ScoredRecord* r : z_e) {
    if (!r->e.has_value()) {
      throw std::invalid_argument("sgen_sup: record '" + r->id +
                                  "' has no entailment label");
    }
    items.emplace_back(get_score(*r, key), *r->e == 0 ? 1 : 0);
  }
  return search_binomial(key, std::move(items), eps, delta);
}

CertifiedResult sgen_psl(ScoreKey key, const RecordRefs& z_e,
                         const RecordRefs& z_u, double eps, double delta,
                         const PslConfig& cfg) {
  if (!(cfg.tau_pl >= 0.0 && cfg.tau_pl <= 1.0)) {
    throw std::invalid_argument("sgen_psl: tau_pl outside [0,1]");
  }
  std::vector<std::pair<double, int>> items;
  for (const ScoredRecord* r : z_e) {
    if (!r->e.has_value()) {
      throw std::invalid_argument("sgen_psl: labeled record '" + r->id +
                                  "' has no entailment label");
    }
    items.emplace_back(get_score(*r, key), *r->e == 0 ? 1 : 0);
  }
  for (const ScoredRecord* r : z_u) {
    if (cfg.filter && std::max(r->f_e, 1.0 - r->f_e) < cfg.tau_pl) continue;
    const int pseudo = r->f_e >= cfg.tau_pl ? 1 : 0;
    items.emplace_back(get_score(*r, key), pseudo == 0 ? 1 : 0);
  }
  return search_binomial(key, std::move(items), eps, delta);
}

CertifiedResult sgen_em(ScoreKey key, const RecordRefs& z_all, double eps,
                        double delta) {
  std::vector<std::pair<double, int>> items;
  items.reserve(z_all.size());
  for (const ScoredRecord* r : z_all) {
    if (!r->em.has_value()) {
      throw std::invalid_argument("sgen_em: record '" + r->id +
                                  "' has no exact-match flag");
    }
    items.emplace_back(get_score(*r, key), *r->em == 0 ? 1 : 0);
  }
  return search_binomial(key, std::move(items), eps, delta);
}

}  // namespace selgen
