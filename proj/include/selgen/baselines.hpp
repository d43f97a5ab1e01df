#pragma once

#include "selgen/calibrate.hpp"

namespace selgen {

// Pseudo-labeling baseline configuration: tau_pl is the entailment-score
// cut, filter drops unlabeled records with max(f_e, 1-f_e) < tau_pl.
struct PslConfig {
  double tau_pl = 0.9;
  bool filter = false;
};

// Supervised learning on labeled records only: per-candidate
// U = u_binom(#{e=0 among selected}, #selected, delta / ceil_log2 |Z_E|).
CertifiedResult sgen_sup(ScoreKey key, const RecordRefs& z_e, double eps,
                         double delta);

// Heuristic pseudo-labeling: unlabeled records get e~ = 1(f_e >= tau_pl)
// (optionally filtered), labeled records keep e, then the supervised
// search runs on the merged set. No FDR-E validity guarantee.
CertifiedResult sgen_psl(ScoreKey key, const RecordRefs& z_e,
                         const RecordRefs& z_u, double eps, double delta,
                         const PslConfig& cfg);

// Unsupervised exact-match baseline: same search with losses from the em
// flag. Controls FDR-EM, not FDR-E.
CertifiedResult sgen_em(ScoreKey key, const RecordRefs& z_all, double eps,
                        double delta);

}  // namespace selgen
