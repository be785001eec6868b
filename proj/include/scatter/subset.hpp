#ifndef SCATTER_SUBSET_HPP
#define SCATTER_SUBSET_HPP

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace scatter {

/// Subsets of the ground set {0..n} as bitmasks. Ground sets are capped at 24
/// elements by the exhaustive matroid routines, well inside 32 bits.
using Subset = std::uint32_t;

inline constexpr int kMaxGroundSet = 24;

inline int cardinality(Subset s) noexcept { return std::popcount(s); }
inline bool contains(Subset s, int i) noexcept { return (s >> i) & 1U; }
inline bool is_subset(Subset a, Subset b) noexcept { return (a & ~b) == 0; }
inline Subset singleton(int i) noexcept { return Subset{1} << i; }
inline Subset full_set(int n) noexcept { return n >= 32 ? ~Subset{0} : (Subset{1} << n) - 1; }

inline std::vector<int> to_indices(Subset s) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(cardinality(s)));
  while (s != 0) {
    out.push_back(std::countr_zero(s));
    s &= s - 1;
  }
  return out;
}

template <typename Range>
Subset from_indices(const Range& indices) {
  Subset s = 0;
  for (int i : indices) s |= singleton(i);
  return s;
}

inline std::string format_subset(Subset s) {
  std::string out = "{";
  bool first = true;
  for (int i : to_indices(s)) {
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

/// Lexicographic order on sorted index lists; used wherever output order
/// must be deterministic.
inline bool subset_less(Subset a, Subset b) {
  const auto ia = to_indices(a);
  const auto ib = to_indices(b);
  if (ia.size() != ib.size()) return ia.size() < ib.size();
  return ia < ib;
}

}  // namespace scatter

#endif  // SCATTER_SUBSET_HPP
