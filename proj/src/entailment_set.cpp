#include "selgen/entailment_set.hpp"

#include <algorithm>
#include <bit>

#include "selgen/binom.hpp"

namespace selgen {

int ceil_log2(std::size_t n) {
  if (n <= 1) return 0;
  return std::bit_width(n - 1);
}

EntailmentSetParam learn_entailment_set(const RecordRefs& z_e, double eps_e,
                                        double delta_e) {
  if (!(eps_e >= 0.0 && eps_e <= 1.0)) {
    throw std::invalid_argument("learn_entailment_set: eps_e outside [0,1]");
  }
  if (!(delta_e > 0.0 && delta_e < 1.0)) {
    throw std::invalid_argument("learn_entailment_set: delta_e outside (0,1)");
  }
  const std::size_t n = z_e.size();
  if (n == 0) return {};  // vacuous, FER trivially 0

  RecordRefs sorted = z_e;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredRecord* a, const ScoredRecord* b) {
                     return a->f_e < b->f_e;
                   });
  for (const ScoredRecord* r : sorted) {
    if (!r->e.has_value()) {
      throw std::invalid_argument(
          "learn_entailment_set: record without label in Z_E");
    }
  }

  // suffix_zeros[i] = #{ j >= i : e_j = 0 } over the sorted order, so the
  // false-entailment count at threshold tau = f_e of candidate i is the
  // suffix count at the first record with f_e >= tau (ties included).
  std::vector<std::int64_t> suffix_zeros(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) {
    suffix_zeros[i] = suffix_zeros[i + 1] + (*sorted[i]->e == 0 ? 1 : 0);
  }
  auto loss_count = [&](std::size_t idx1) {  // 1-based candidate index
    const double tau = sorted[idx1 - 1]->f_e;
    const auto first = std::lower_bound(
        sorted.begin(), sorted.end(), tau,
        [](const ScoredRecord* r, double t) { return r->f_e < t; });
    return suffix_zeros[static_cast<std::size_t>(first - sorted.begin())];
  };
  auto feasible = [&](std::size_t idx1) {
    return u_binom(loss_count(idx1), static_cast<std::int64_t>(n), delta_e) <=
           eps_e;
  };

  // The largest candidate gates the whole search: with feasibility monotone
  // in tau, an infeasible top candidate means the empty feasible set.
  if (!feasible(n)) return {};

  // Bisection for the minimal feasible candidate. lo = 0 is a virtual
  // always-infeasible sentinel below the first candidate, which keeps the
  // search exact down to index 1 in ceil_log2(n) iterations.
  std::size_t lo = 0;
  std::size_t hi = n;
  const int iters = ceil_log2(n);
  for (int it = 0; it < iters; ++it) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {sorted[hi - 1]->f_e, true};
}

int pseudo_label(const EntailmentSetParam& p, const ScoredRecord& r) {
  return r.f_e >= p.tau_e ? 1 : 0;
}

}  // namespace selgen
