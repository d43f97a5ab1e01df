#pragma once

#include <limits>

#include "selgen/records.hpp"

namespace selgen {

// Learned entailment-set threshold. The infeasible sentinel is tau_e = +inf:
// the empty entailment set, whose false entailment rate is 0 by construction.
struct EntailmentSetParam {
  double tau_e = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

// Conformal entailment-set learning: the smallest observed f_e threshold
// whose empirical false-entailment count passes the exact binomial test
// u_binom(k, |z_e|, delta_e) <= eps_e. Feasibility is monotone in the
// threshold, so a gated bisection over the sorted scores returns exactly
// the minimal feasible candidate; the sentinel when even the largest
// candidate fails. All records in z_e must carry the label e.
EntailmentSetParam learn_entailment_set(const RecordRefs& z_e, double eps_e,
                                        double delta_e);

// ê = 1(f_e >= tau_e); the sentinel labels nothing as entailed.
int pseudo_label(const EntailmentSetParam& p, const ScoredRecord& r);

// Smallest I with 2^I >= n (n >= 1). The iteration count of every
// threshold search in this library.
int ceil_log2(std::size_t n);

}  // namespace selgen
