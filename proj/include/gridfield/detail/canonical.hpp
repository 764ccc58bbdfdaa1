#pragma once

#include <utility>

namespace gridfield::detail {

// Map (i,j) into the region i <= j, i >= n-j+1.  Minor determinants are
// invariant under the transpose and the antidiagonal reflection, and i+j
// keeps its parity under both.
inline std::pair<int, int> canonicalize(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < n - j + 1) {
    int ci = n - j + 1;
    int cj = n - i + 1;
    i = ci;
    j = cj;
  }
  return {i, j};
}

}  // namespace gridfield::detail
