#pragma once

#include <cstdint>
#include <vector>

namespace wlign {

// k-tuples over [0,n) are enumerated in lexicographic order throughout; the
// flat index of (v_1,...,v_k) is sum v_i * n^(k-i), so index order == lex order.
using Tuple = std::vector<int>;

inline std::uint64_t tuple_count(int n, int k) {
  std::uint64_t c = 1;
  for (int i = 0; i < k; ++i) c *= static_cast<std::uint64_t>(n);
  return c;
}

inline std::uint64_t tuple_to_index(const Tuple& t, int n) {
  std::uint64_t idx = 0;
  for (int v : t) idx = idx * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(v);
  return idx;
}

inline void index_to_tuple(std::uint64_t idx, int n, int k, Tuple& out) {
  out.assign(k, 0);
  for (int i = k - 1; i >= 0; --i) {
    out[i] = static_cast<int>(idx % n);
    idx /= n;
  }
}

inline Tuple index_to_tuple(std::uint64_t idx, int n, int k) {
  Tuple t;
  index_to_tuple(idx, n, k, t);
  return t;
}

// In-place lexicographic successor; returns false after the last tuple.
inline bool next_tuple(Tuple& t, int n) {
  for (int i = static_cast<int>(t.size()) - 1; i >= 0; --i) {
    if (++t[i] < n) return true;
    t[i] = 0;
  }
  return false;
}

}  // namespace wlign
