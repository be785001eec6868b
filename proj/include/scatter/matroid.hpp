#ifndef SCATTER_MATROID_HPP
#define SCATTER_MATROID_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scatter/arrangement.hpp"
#include "scatter/error.hpp"
#include "scatter/rational.hpp"
#include "scatter/subset.hpp"

namespace scatter {

/// A minimal dependent set of columns of L with its linear relation
/// sum_{i in support} alpha_i L_i = 0, normalized so alpha.front() == 1.
struct Circuit {
  Subset support = 0;
  std::vector<int> indices;
  RationalVector alpha;
};

enum class FlatType { TypeI, TypeII, Neither };

inline std::string_view to_string(FlatType t) {
  switch (t) {
    case FlatType::TypeI: return "type_i";
    case FlatType::TypeII: return "type_ii";
    case FlatType::Neither: return "neither";
  }
  return "neither";
}

/// A closed set of M(L). type_i when rank(A_I^T) = rank(L_I) (the affine
/// subspace cut out by I is non-empty), type_ii when the rank drops by one
/// (the intersection lies at infinity).
struct Flat {
  Subset support = 0;
  int rank_L = 0;
  int rank_A = 0;
  FlatType type = FlatType::TypeI;
};

/// Linear order on the ground set given by pairwise distinct integer weights.
struct WeightOrder {
  std::vector<long long> omega;

  static WeightOrder make(std::vector<long long> w) {
    std::vector<long long> sorted = w;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorKind::MalformedInput, "weight vector entries must be pairwise distinct");
    return WeightOrder{std::move(w)};
  }

  /// omega = (1, 2, ..., size).
  static WeightOrder identity(int size) {
    std::vector<long long> w(static_cast<std::size_t>(size));
    std::iota(w.begin(), w.end(), 1LL);
    return WeightOrder{std::move(w)};
  }

  /// A uniformly random permutation of (1, ..., size).
  template <typename Rng>
  static WeightOrder random(int size, Rng& rng) {
    auto w = identity(size).omega;
    std::shuffle(w.begin(), w.end(), rng);
    return WeightOrder{std::move(w)};
  }

  int size() const noexcept { return static_cast<int>(omega.size()); }
  long long operator[](int i) const { return omega[static_cast<std::size_t>(i)]; }

  /// Element of s with the smallest weight.
  int argmin(Subset s) const {
    int best = -1;
    for (int i : to_indices(s))
      if (best < 0 || omega[static_cast<std::size_t>(i)] < omega[static_cast<std::size_t>(best)]) best = i;
    return best;
  }
};

/// Exact rank oracle on column subsets of a rational matrix, with a cache.
class ColumnRank {
 public:
  explicit ColumnRank(const RationalMatrix& m) : dim_(m.rows()) {
    for (std::size_t j = 0; j < m.cols(); ++j) columns_.push_back(m.column(j));
  }

  int size() const noexcept { return static_cast<int>(columns_.size()); }
  const RationalVector& column(int j) const { return columns_[static_cast<std::size_t>(j)]; }
  std::size_t dim() const noexcept { return dim_; }

  int operator()(Subset s) {
    if (auto it = cache_.find(s); it != cache_.end()) return it->second;
    EchelonBasis basis(dim_);
    for (int j : to_indices(s)) basis.insert(columns_[static_cast<std::size_t>(j)]);
    const int r = static_cast<int>(basis.size());
    cache_.emplace(s, r);
    return r;
  }

 private:
  std::size_t dim_;
  std::vector<RationalVector> columns_;
  std::unordered_map<Subset, int> cache_;
};

namespace detail {

inline void check_ground_set(int size) {
  if (size > kMaxGroundSet) {
    throw Error(ErrorKind::GroundSetTooLarge,
                "ground set has " + std::to_string(size) + " elements; limit is " + std::to_string(kMaxGroundSet));
  }
}

inline RationalMatrix a_transpose(const ArrangementMatrix& arr) { return arr.A().transpose(); }

/// Calls visit(mask) for every k-subset of {0..size-1} in lexicographic order.
inline void for_each_k_subset(int size, int k, const std::function<void(Subset)>& visit) {
  if (k > size || k < 0) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    visit(from_indices(idx));
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == size - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace detail

/// Kernel vector of L restricted to a circuit support, first entry scaled to 1.
inline RationalVector circuit_relation(const RationalMatrix& L, Subset support) {
  const auto cols = to_indices(support);
  const auto ker = kernel(L.select_columns(cols));
  if (ker.size() != 1) throw Error(ErrorKind::InternalInconsistency, "circuit kernel is not one-dimensional");
  RationalVector alpha = ker.front();
  const Rational lead = alpha.front();
  if (sgn(lead) == 0) throw Error(ErrorKind::InternalInconsistency, "circuit relation has a zero coefficient");
  for (auto& a : alpha) a /= lead;
  return alpha;
}

/// All circuits of M(L), ascending by cardinality then lexicographically.
/// Subsets containing an already-found circuit are skipped, so every
/// dependent set reached is minimal.
inline std::vector<Circuit> circuits(const ArrangementMatrix& arr) {
  const int size = arr.ground_size();
  detail::check_ground_set(size);
  ColumnRank rank_of(arr.L());
  std::vector<Circuit> out;
  std::vector<Subset> found;
  const int max_size = std::min(size, arr.d() + 2);
  for (int k = 1; k <= max_size; ++k) {
    detail::for_each_k_subset(size, k, [&](Subset s) {
      for (Subset c : found)
        if (is_subset(c, s)) return;
      if (rank_of(s) < k) {
        found.push_back(s);
        out.push_back(Circuit{s, to_indices(s), circuit_relation(arr.L(), s)});
      }
    });
  }
  return out;
}

/// Closure of s in M(L): s together with every element that does not raise the rank.
inline Subset closure(ColumnRank& rank_of, Subset s) {
  const int r = rank_of(s);
  Subset out = s;
  for (int i = 0; i < rank_of.size(); ++i)
    if (!contains(s, i) && rank_of(s | singleton(i)) == r) out |= singleton(i);
  return out;
}

inline FlatType classify_flat(int rank_L, int rank_A) {
  if (rank_A == rank_L) return FlatType::TypeI;
  if (rank_A == rank_L - 1) return FlatType::TypeII;
  return FlatType::Neither;
}

/// Lattice of flats, built rank by rank: every flat of rank k+1 is the
/// closure of a rank-k flat plus one element. Sorted by rank, then lexicographically.
inline std::vector<Flat> flats(const ArrangementMatrix& arr) {
  const int size = arr.ground_size();
  detail::check_ground_set(size);
  ColumnRank rank_L(arr.L());
  ColumnRank rank_A(detail::a_transpose(arr));
  std::vector<Subset> current{closure(rank_L, 0)};
  std::vector<Subset> all = current;
  std::unordered_set<Subset> seen(current.begin(), current.end());
  while (!current.empty()) {
    std::vector<Subset> next;
    for (Subset f : current) {
      for (int i = 0; i < size; ++i) {
        if (contains(f, i)) continue;
        const Subset g = closure(rank_L, f | singleton(i));
        if (seen.insert(g).second) next.push_back(g);
      }
    }
    std::sort(next.begin(), next.end(), subset_less);
    all.insert(all.end(), next.begin(), next.end());
    current = std::move(next);
  }
  std::vector<Flat> out;
  out.reserve(all.size());
  for (Subset s : all) {
    const int rl = rank_L(s);
    const int ra = rank_A(s);
    out.push_back(Flat{s, rl, ra, classify_flat(rl, ra)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Flat& a, const Flat& b) {
    if (a.rank_L != b.rank_L) return a.rank_L < b.rank_L;
    return subset_less(a.support, b.support);
  });
  return out;
}

/// Each circuit minus its omega-minimal element; only inclusion-minimal
/// results are kept, sorted and deduplicated.
inline std::vector<Subset> broken_circuits(const std::vector<Circuit>& circs, const WeightOrder& omega) {
  std::vector<Subset> raw;
  for (const auto& c : circs) raw.push_back(c.support & ~singleton(omega.argmin(c.support)));
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  std::vector<Subset> minimal;
  for (Subset s : raw) {
    bool keep = true;
    for (Subset t : raw)
      if (t != s && is_subset(t, s)) keep = false;
    if (keep) minimal.push_back(s);
  }
  std::sort(minimal.begin(), minimal.end(), subset_less);
  return minimal;
}

/// Faces of the broken-circuit complex: subsets containing no broken circuit.
/// visit(face) is called for every face, including the empty one.
inline void for_each_nbc_face(int size, const std::vector<Subset>& broken, const std::function<void(Subset)>& visit) {
  std::function<void(int, Subset)> rec = [&](int next, Subset face) {
    visit(face);
    for (int i = next; i < size; ++i) {
      const Subset grown = face | singleton(i);
      bool ok = true;
      for (Subset bc : broken)
        if (contains(bc, i) && is_subset(bc, grown)) {
          ok = false;
          break;
        }
      if (ok) rec(i + 1, grown);
    }
  };
  rec(0, 0);
}

/// Facets of the broken-circuit complex (bases of the matroid whose circuits
/// are the minimal broken circuits). All facets must have d+1 elements.
inline std::vector<Subset> nbc_bases(const ArrangementMatrix& arr, const WeightOrder& omega,
                                     const std::vector<Circuit>& circs) {
  const int size = arr.ground_size();
  if (omega.size() != size) throw Error(ErrorKind::MalformedInput, "weight vector has wrong length");
  const auto broken = broken_circuits(circs, omega);
  const auto is_face = [&](Subset s) {
    for (Subset bc : broken)
      if (is_subset(bc, s)) return false;
    return true;
  };
  std::vector<Subset> facets;
  for_each_nbc_face(size, broken, [&](Subset face) {
    for (int j = 0; j < size; ++j)
      if (!contains(face, j) && is_face(face | singleton(j))) return;
    facets.push_back(face);
  });
  for (Subset f : facets) {
    if (cardinality(f) != arr.d() + 1) {
      throw Error(ErrorKind::InternalInconsistency,
                  "broken-circuit facet " + format_subset(f) + " does not have d+1 elements");
    }
  }
  std::sort(facets.begin(), facets.end(), subset_less);
  return facets;
}

inline std::vector<Subset> nbc_bases(const ArrangementMatrix& arr, const WeightOrder& omega) {
  return nbc_bases(arr, omega, circuits(arr));
}

/// deg R_L as the number of nbc bases, confirmed across the identity order and
/// three random orders (fixed internal seed, so the result is deterministic).
inline int reciprocal_degree(const ArrangementMatrix& arr, const std::vector<Circuit>& circs) {
  const int size = arr.ground_size();
  const auto count = static_cast<int>(nbc_bases(arr, WeightOrder::identity(size), circs).size());
  std::mt19937_64 rng(0x5eedULL + static_cast<unsigned>(size));
  for (int trial = 0; trial < 3; ++trial) {
    const auto c = static_cast<int>(nbc_bases(arr, WeightOrder::random(size, rng), circs).size());
    if (c != count) {
      throw Error(ErrorKind::InternalInconsistency, "nbc basis count depends on the weight order (" +
                                                        std::to_string(count) + " vs " + std::to_string(c) + ")");
    }
  }
  return count;
}

inline int reciprocal_degree(const ArrangementMatrix& arr) { return reciprocal_degree(arr, circuits(arr)); }

/// rank(A) = d, i.e. the hyperplanes' normal vectors span C^d.
inline bool is_essential(const ArrangementMatrix& arr) {
  return static_cast<int>(rank(detail::a_transpose(arr))) == arr.d();
}

/// (-1)^d chi(C^d minus the arrangement), computed as |chi_A(1)| where chi_A is
/// the characteristic polynomial of the affine intersection semilattice. The
/// non-empty intersections are exactly the type_i flats, ordered by inclusion.
inline int ml_degree(const ArrangementMatrix& arr, const std::vector<Flat>& all_flats) {
  if (!is_essential(arr)) throw Error(ErrorKind::NotEssential, "rank(A) < d: the arrangement is not essential");
  std::vector<const Flat*> poset;
  for (const auto& f : all_flats)
    if (f.type == FlatType::TypeI) poset.push_back(&f);
  std::sort(poset.begin(), poset.end(), [](const Flat* a, const Flat* b) { return a->rank_L < b->rank_L; });
  std::vector<long long> mu(poset.size(), 0);
  long long chi_at_one = 0;
  for (std::size_t k = 0; k < poset.size(); ++k) {
    if (k == 0) {
      if (poset[0]->rank_L != 0) throw Error(ErrorKind::InternalInconsistency, "missing bottom flat");
      mu[0] = 1;
    } else {
      long long acc = 0;
      for (std::size_t j = 0; j < k; ++j)
        if (poset[j]->support != poset[k]->support && is_subset(poset[j]->support, poset[k]->support)) acc += mu[j];
      mu[k] = -acc;
    }
    chi_at_one += mu[k];
  }
  const long long signed_count = (arr.d() % 2 == 0 ? 1 : -1) * chi_at_one;
  if (signed_count < 0) {
    throw Error(ErrorKind::InternalInconsistency, "(-1)^d chi_A(1) is negative: " + std::to_string(signed_count));
  }
  return static_cast<int>(signed_count);
}

inline int ml_degree(const ArrangementMatrix& arr) { return ml_degree(arr, flats(arr)); }

/// Crapo's beta invariant (-1)^r(E) sum_{X subset E} (-1)^|X| r(X), with all
/// 2^|E| ranks produced by a depth-first walk over an incremental echelon basis.
inline long long beta_invariant(const ArrangementMatrix& arr) {
  const int size = arr.ground_size();
  detail::check_ground_set(size);
  ColumnRank cols(arr.L());
  EchelonBasis basis(cols.dim());
  long long sum = 0;
  std::function<void(int, int)> rec = [&](int next, int card) {
    sum += (card % 2 == 0 ? 1 : -1) * static_cast<long long>(basis.size());
    for (int i = next; i < size; ++i) {
      const bool added = basis.insert(cols.column(i));
      rec(i + 1, card + 1);
      if (added) basis.pop();
    }
  };
  rec(0, 0);
  const int r = arr.d() + 1;
  return (r % 2 == 0 ? 1 : -1) * sum;
}

/// Connectivity via "lie in a common circuit" (union-find).
inline bool circuit_connected(int size, const std::vector<Circuit>& circs) {
  if (size <= 1) return true;
  std::vector<int> parent(static_cast<std::size_t>(size));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
    return i;
  };
  for (const auto& c : circs)
    for (std::size_t k = 1; k < c.indices.size(); ++k) parent[static_cast<std::size_t>(find(c.indices[k]))] = find(c.indices[0]);
  const int root = find(0);
  for (int i = 1; i < size; ++i)
    if (find(i) != root) return false;
  return true;
}

/// beta != 0, cross-checked against circuit connectivity.
inline bool is_connected(const ArrangementMatrix& arr) {
  const bool by_beta = beta_invariant(arr) != 0;
  const bool by_circuits = circuit_connected(arr.ground_size(), circuits(arr));
  if (by_beta != by_circuits) {
    throw Error(ErrorKind::InternalInconsistency, "beta invariant and circuit connectivity disagree");
  }
  return by_beta;
}

struct DegreeCriterion {
  bool equal = true;
  /// Proper type_ii flats; empty iff equal.
  std::vector<Flat> witnesses;
};

/// ML degree equals reciprocal degree iff no proper flat lies at infinity.
inline DegreeCriterion degree_criterion(const ArrangementMatrix& arr, const std::vector<Flat>& all_flats) {
  DegreeCriterion out;
  const Subset ground = full_set(arr.ground_size());
  for (const auto& f : all_flats)
    if (f.support != ground && f.type == FlatType::TypeII) out.witnesses.push_back(f);
  out.equal = out.witnesses.empty();
  return out;
}

inline DegreeCriterion degree_criterion(const ArrangementMatrix& arr) { return degree_criterion(arr, flats(arr)); }

inline const Flat* find_flat(const std::vector<Flat>& all_flats, Subset support) {
  for (const auto& f : all_flats)
    if (f.support == support) return &f;
  return nullptr;
}

}  // namespace scatter

#endif  // SCATTER_MATROID_HPP
