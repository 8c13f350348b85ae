#pragma once

#include <vector>

namespace causalkit::detail {

/// Positions k such that sorted_values[k] < sorted_values[k+1]; when more
/// than max_candidates boundaries exist, an evenly spaced rank subset is
/// kept. Rank-based selection keeps split search invariant under strictly
/// monotone transforms of a feature.
inline std::vector<int> candidate_boundaries(const std::vector<double>& sorted_values,
                                             int max_candidates) {
  std::vector<int> all;
  const int n = static_cast<int>(sorted_values.size());
  for (int k = 0; k + 1 < n; ++k) {
    if (sorted_values[static_cast<std::size_t>(k)] <
        sorted_values[static_cast<std::size_t>(k + 1)]) {
      all.push_back(k);
    }
  }
  if (max_candidates <= 0 || static_cast<int>(all.size()) <= max_candidates) return all;
  std::vector<int> picked;
  picked.reserve(static_cast<std::size_t>(max_candidates));
  const double stride = static_cast<double>(all.size()) / max_candidates;
  int prev = -1;
  for (int c = 0; c < max_candidates; ++c) {
    int idx = static_cast<int>(stride * (c + 1)) - 1;
    if (idx <= prev) idx = prev + 1;
    if (idx >= static_cast<int>(all.size())) break;
    picked.push_back(all[static_cast<std::size_t>(idx)]);
    prev = idx;
  }
  return picked;
}

}  // namespace causalkit::detail
