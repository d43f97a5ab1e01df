#pragma once

#include "selgen/entailment_set.hpp"
#include "selgen/records.hpp"

namespace selgen {

// Semi-supervised bound on P{e=0}: eps_E - L_Binom(FNER count) + U_Binom(NER
// count), clamped to [0,1], with all intermediate quantities kept for
// diagnostics and recomposition tests.
struct SslBound {
  double u_ssl = 1.0;
  double eps_e_used = 0.0;
  EntailmentSetParam tau_e;
  double fner_lower = 0.0;
  double ner_upper = 1.0;
  std::int64_t fner_count = 0;  // #{e=1, f_e < tau_E} in Z_E
  std::int64_t ner_count = 0;   // #{f_e < tau_E} in Z_U
  std::int64_t n_labeled = 0;
  std::int64_t n_unlabeled = 0;
};

// Composed FDR-E bound U = w_SL * U_SL + w_SSL * U_SSL_OPT, clamped to [0,1].
struct ComposedBound {
  double w_sl = 1.0;
  double u_sl = 1.0;
  double w_ssl = 1.0;
  double u_ssl_opt = 1.0;
  double u = 1.0;
  SslBound ssl;  // winning epsilon_E candidate
  std::int64_t k_sl = 0;
  std::int64_t n_labeled = 0;
  std::int64_t n_unlabeled = 0;
};

// U_SSL for a single eps_e. Splits delta_e between the entailment-set
// learner and the FNER lower bound, and spends delta_s/2 on the NER upper
// bound. Empty subsets degrade to the vacuous bound through the n=0
// conventions of u_binom/l_binom.
SslBound compute_u_ssl(const RecordRefs& z_e, const RecordRefs& z_u,
                       double delta_s, double eps_e, double delta_e);

// Minimizes U_SSL over the linear grid eps_i = eps_max * (q-i+1)/q,
// i = 1..q, with per-candidate budgets delta_s/q and delta_e/q; ties go to
// the smaller (more conservative) eps_e.
SslBound compute_u_ssl_opt(const RecordRefs& z_e, const RecordRefs& z_u,
                           double delta_s, int q, double delta_e);

// Full FDR-E bound: visibility weights at delta_w/2 each, supervised term
// at delta_s/2, semi-supervised term via compute_u_ssl_opt at
// (delta_s/2, delta_e/2).
ComposedBound fdr_e_bound(const RecordRefs& z_e, const RecordRefs& z_u,
                          double delta_s, int q, double delta_e,
                          double delta_w);

}  // namespace selgen
