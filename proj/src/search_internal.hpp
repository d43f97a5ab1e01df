#pragma once

#include <cstddef>
#include <functional>
#include <limits>

namespace selgen::detail {

// Bisection over 1-based candidate indices with a virtual always-descend
// lower sentinel at 0, mirroring the threshold-search listings: descend
// (hi <- mid) when the candidate's bound clears the target, ascend
// otherwise. Tracks the bound-minimizing candidate (ties -> latest) and
// the most recent feasible candidate.
struct SearchState {
  bool any_feasible = false;
  std::size_t last_feasible_idx = 0;
  double last_feasible_bound = 1.0;
  std::size_t min_idx = 0;
  double min_bound = std::numeric_limits<double>::infinity();
};

// evaluate(idx1, iter) computes and records the bound for candidate idx1;
// returns the bound.
inline SearchState bisect_candidates(
    std::size_t n, int iterations, double eps,
    const std::function<double(std::size_t, int)>& evaluate) {
  SearchState st;
  std::size_t lo = 0;
  std::size_t hi = n;
  for (int it = 1; it <= iterations; ++it) {
    const std::size_t mid = (lo + hi + 1) / 2;
    const double u = evaluate(mid, it);
    if (u <= st.min_bound) {
      st.min_bound = u;
      st.min_idx = mid;
    }
    if (u <= eps) {
      st.any_feasible = true;
      st.last_feasible_idx = mid;
      st.last_feasible_bound = u;
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return st;
}

}  // namespace selgen::detail
