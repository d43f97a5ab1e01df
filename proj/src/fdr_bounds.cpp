#include "selgen/fdr_bounds.hpp"

#include <algorithm>

#include "selgen/binom.hpp"

namespace selgen {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

SslBound compute_u_ssl(const RecordRefs& z_e, const RecordRefs& z_u,
                       double delta_s, double eps_e, double delta_e) {
  SslBound b;
  b.eps_e_used = eps_e;
  b.n_labeled = static_cast<std::int64_t>(z_e.size());
  b.n_unlabeled = static_cast<std::int64_t>(z_u.size());

  b.tau_e = learn_entailment_set(z_e, eps_e, delta_e / 2.0);
  for (const ScoredRecord* r : z_e) {
    if (*r->e == 1 && r->f_e < b.tau_e.tau_e) ++b.fner_count;
  }
  for (const ScoredRecord* r : z_u) {
    if (r->f_e < b.tau_e.tau_e) ++b.ner_count;
  }
  b.fner_lower = l_binom(b.fner_count, b.n_labeled, delta_e / 2.0);
  b.ner_upper = u_binom(b.ner_count, b.n_unlabeled, delta_s / 2.0);
  b.u_ssl = clamp01(eps_e - b.fner_lower + b.ner_upper);
  return b;
}

SslBound compute_u_ssl_opt(const RecordRefs& z_e, const RecordRefs& z_u,
                           double delta_s, int q, double delta_e) {
  if (q < 1) throw std::invalid_argument("compute_u_ssl_opt: q must be >= 1");
  double eps_max = 0.0;
  if (!z_e.empty()) {
    std::int64_t zeros = 0;
    for (const ScoredRecord* r : z_e) {
      if (!r->e.has_value()) {
        throw std::invalid_argument(
            "compute_u_ssl_opt: record without label in Z_E");
      }
      if (*r->e == 0) ++zeros;
    }
    eps_max = static_cast<double>(zeros) / static_cast<double>(z_e.size());
  }

  SslBound best;
  for (int i = 1; i <= q; ++i) {
    const double eps_i = eps_max * static_cast<double>(q - i + 1) / q;
    SslBound cand =
        compute_u_ssl(z_e, z_u, delta_s / q, eps_i, delta_e / q);
    if (i == 1 || cand.u_ssl <= best.u_ssl) {  // later = smaller eps wins ties
      best = cand;
    }
  }
  return best;
}

ComposedBound fdr_e_bound(const RecordRefs& z_e, const RecordRefs& z_u,
                          double delta_s, int q, double delta_e,
                          double delta_w) {
  ComposedBound cb;
  cb.n_labeled = static_cast<std::int64_t>(z_e.size());
  cb.n_unlabeled = static_cast<std::int64_t>(z_u.size());
  const std::int64_t n = cb.n_labeled + cb.n_unlabeled;
  if (n == 0) return cb;  // vacuous

  cb.w_sl = u_binom(cb.n_labeled, n, delta_w / 2.0);
  for (const ScoredRecord* r : z_e) {
    if (!r->e.has_value()) {
      throw std::invalid_argument("fdr_e_bound: record without label in Z_E");
    }
    if (*r->e == 0) ++cb.k_sl;
  }
  cb.u_sl = u_binom(cb.k_sl, cb.n_labeled, delta_s / 2.0);
  cb.w_ssl = u_binom(cb.n_unlabeled, n, delta_w / 2.0);
  cb.ssl = compute_u_ssl_opt(z_e, z_u, delta_s / 2.0, q, delta_e / 2.0);
  cb.u_ssl_opt = cb.ssl.u_ssl;
  cb.u = clamp01(cb.w_sl * cb.u_sl + cb.w_ssl * cb.u_ssl_opt);
  return cb;
}

}  // namespace selgen
