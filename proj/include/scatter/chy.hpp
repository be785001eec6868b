#ifndef SCATTER_CHY_HPP
#define SCATTER_CHY_HPP

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "scatter/homotopy.hpp"

namespace scatter {

/// The arrangement of M_{0,m}: the minors of the 2 x m matrix with columns
/// (1,0), (1,1), (1,x_1), ..., (1,x_{m-3}), (0,1) that are not constant.
struct ChyInstance {
  int m = 0;
  ArrangementMatrix arrangement;
  /// Column k is the minor p_ij with labels[k] = (i, j).
  std::vector<std::pair<int, int>> labels;
  CVector s;
};

/// Columns of L_m block by block: block j (j = 1..m-3) holds x_j, x_j - 1,
/// x_j - x_1, ..., x_j - x_{j-1}.
inline RationalMatrix chy_matrix(int m) {
  if (m < 4 || m > 9) throw Error(ErrorKind::BadM, "m must lie in 4..9, got " + std::to_string(m));
  const int d = m - 3;
  const int cols = m * (m - 3) / 2;
  RationalMatrix L(static_cast<std::size_t>(d + 1), static_cast<std::size_t>(cols));
  std::size_t c = 0;
  for (int j = 1; j <= d; ++j) {
    L(static_cast<std::size_t>(j), c++) = 1;
    for (int i = 0; i < j; ++i) {
      L(static_cast<std::size_t>(j), c) = 1;
      L(static_cast<std::size_t>(i), c) = -1;
      ++c;
    }
  }
  return L;
}

inline std::vector<std::pair<int, int>> chy_labels(int m) {
  std::vector<std::pair<int, int>> out;
  for (int j = 1; j <= m - 3; ++j) {
    out.emplace_back(1, j + 2);
    for (int i = 0; i < j; ++i) out.emplace_back(i + 2, j + 2);
  }
  return out;
}

template <typename Rng>
ChyInstance build_chy(int m, const std::optional<CVector>& s, Rng& rng) {
  ChyInstance inst{m, ArrangementMatrix::from_matrix(chy_matrix(m)), chy_labels(m), {}};
  const int size = inst.arrangement.ground_size();
  if (s) {
    if (s->size() != size) throw Error(ErrorKind::MalformedInput, "s must have " + std::to_string(size) + " entries");
    inst.s = *s;
  } else {
    inst.s.resize(size);
    for (int i = 0; i < size; ++i) inst.s(i) = detail::complex_gaussian(rng);
  }
  return inst;
}

inline ChyInstance build_chy(int m, const std::optional<CVector>& s = std::nullopt, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  return build_chy(m, s, rng);
}

/// Columns of L_m whose forms only involve x_0 = 1 and x_i for i in W:
/// {x_i : i in W} and {x_j - x_i : j in W, i in {0} + W, i < j}.
inline Subset chy_flat_support(int m, Subset W) {
  Subset out = 0;
  int c = 0;
  for (int j = 1; j <= m - 3; ++j) {
    if (contains(W, j)) out |= singleton(c);
    ++c;
    for (int i = 0; i < j; ++i, ++c)
      if (contains(W, j) && (i == 0 || contains(W, i))) out |= singleton(c);
  }
  return out;
}

struct TypeTwoFlat {
  int r = 0;
  Subset W = 0;  // subset of {1..m-3}
  Subset support = 0;
};

/// All I_r(W), r = 0..m-4, each checked to be a type_ii flat of M(L_m).
inline std::vector<TypeTwoFlat> type_two_flats(const ChyInstance& inst) {
  const int d = inst.m - 3;
  const auto& arr = inst.arrangement;
  ColumnRank rank_L(arr.L());
  ColumnRank rank_A(detail::a_transpose(arr));
  std::vector<TypeTwoFlat> out;
  for (int r = 0; r <= d - 1; ++r) {
    int count = 0;
    detail::for_each_k_subset(d, d - r, [&](Subset w0) {
      const Subset W = w0 << 1;  // shift {0..d-1} to {1..d}
      const Subset support = chy_flat_support(inst.m, W);
      const int rl = rank_L(support);
      if (closure(rank_L, support) != support || rl != d - r + 1 || rank_A(support) != rl - 1) {
        throw Error(ErrorKind::CensusMismatch,
                    "I_" + std::to_string(r) + "(" + format_subset(W) + ") = " + format_subset(support) +
                        " is not a type_ii flat of rank " + std::to_string(d - r + 1));
      }
      out.push_back({r, W, support});
      ++count;
    });
    long long binom = 1;
    for (int k = 0; k < r; ++k) binom = binom * (d - k) / (k + 1);
    if (count != binom) throw Error(ErrorKind::CensusMismatch, "wrong number of I_r(W) flats");
  }
  return out;
}

/// Type_ii flats of M(L_m) that are not of the form I_r(W) (exhaustive, so
/// only practical for small m).
inline std::vector<Flat> extra_type_two_flats(const ChyInstance& inst, const std::vector<TypeTwoFlat>& known) {
  std::vector<Flat> extra;
  for (const auto& f : flats(inst.arrangement)) {
    if (f.type != FlatType::TypeII) continue;
    const bool listed = std::any_of(known.begin(), known.end(), [&](const TypeTwoFlat& t) { return t.support == f.support; });
    if (!listed) extra.push_back(f);
  }
  return extra;
}

struct CensusEntry {
  int r = 0;
  Subset W = 0;
  Subset support = 0;
  long long expected_count = 0;         // (m-3-r)!
  int observed_count = 0;
  long long expected_multiplicity = 0;  // r!
  std::vector<int> observed_multiplicities;
  bool matches() const {
    return observed_count == expected_count &&
           std::all_of(observed_multiplicities.begin(), observed_multiplicities.end(),
                       [&](int k) { return k == expected_multiplicity; });
  }
};

struct Census {
  std::vector<CensusEntry> entries;  // r = 0 first (the interior), then by r and W
  int total_paths = 0;
  int path_mass = 0;  // interior + sum of observed multiplicities
  bool all_match() const {
    return std::all_of(entries.begin(), entries.end(), [](const CensusEntry& e) { return e.matches(); });
  }
};

inline long long factorial(int k) {
  long long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// Matches every boundary cluster of a report on L_m to its stratum I_r(W).
/// Deviations from the predicted counts are recorded, not thrown.
inline Census boundary_census(const ChyInstance& inst, const SolutionReport& report) {
  const int d = inst.m - 3;
  Census census;
  for (const auto& f : type_two_flats(inst)) {
    CensusEntry e;
    e.r = f.r;
    e.W = f.W;
    e.support = f.support;
    e.expected_count = factorial(d - f.r);
    e.expected_multiplicity = factorial(f.r);
    census.entries.push_back(e);
  }
  auto& interior = census.entries.front();
  interior.observed_count = static_cast<int>(report.interior.size());
  for (const auto& sol : report.interior) interior.observed_multiplicities.push_back(static_cast<int>(sol.paths.size()));
  for (const auto& cl : report.boundary_clusters) {
    auto it = std::find_if(census.entries.begin(), census.entries.end(),
                           [&](const CensusEntry& e) { return e.r > 0 && e.support == cl.support; });
    if (it == census.entries.end())
      throw Error(ErrorKind::UnmatchedCluster, "boundary cluster on " + format_subset(cl.support) + " matches no I_r(W)");
    ++it->observed_count;
    it->observed_multiplicities.push_back(cl.multiplicity);
  }
  census.total_paths = report.path_stats.total;
  for (const auto& e : census.entries)
    for (int k : e.observed_multiplicities) census.path_mass += k;
  return census;
}

/// L_m restricted to rows {0} + W and the columns of I_r(W).
inline RationalMatrix chy_submatrix(const ChyInstance& inst, Subset W) {
  std::vector<int> rows{0};
  for (int j : to_indices(W)) rows.push_back(j);
  const auto cols = to_indices(chy_flat_support(inst.m, W));
  return inst.arrangement.L().select_rows(rows).select_columns(cols);
}

/// The nonzero coordinates of every boundary cluster on I_r(W) solve the
/// scattering equations of L_{m-r} with exponents s restricted to I_r(W).
inline bool sub_scattering_check(const ChyInstance& inst, const SolutionReport& report, double tol = 1e-6) {
  const auto flats_list = type_two_flats(inst);
  for (const auto& cl : report.boundary_clusters) {
    auto it = std::find_if(flats_list.begin(), flats_list.end(),
                           [&](const TypeTwoFlat& f) { return f.r > 0 && f.support == cl.support; });
    if (it == flats_list.end())
      throw Error(ErrorKind::UnmatchedCluster, "boundary cluster on " + format_subset(cl.support) + " matches no I_r(W)");
    const RationalMatrix sub = chy_submatrix(inst, it->W);
    if (!(sub == chy_matrix(inst.m - it->r)))
      throw Error(ErrorKind::SubsystemViolation, "submatrix on " + format_subset(cl.support) + " is not L_" +
                                                      std::to_string(inst.m - it->r));
    const auto sub_arr = ArrangementMatrix::from_matrix(sub);
    const auto cols = to_indices(cl.support);
    CVector y(static_cast<Eigen::Index>(cols.size()));
    CVector s(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
      y(static_cast<Eigen::Index>(k)) = cl.representative(cols[k]);
      s(static_cast<Eigen::Index>(k)) = inst.s(cols[k]);
    }
    try {
      const auto inv = phi_inverse(sub_arr, y, tol);
      const CVector forms = linear_forms_at(sub_arr, inv.x);
      const double scale = s.cwiseQuotient(forms).cwiseAbs().maxCoeff();
      const double residual = scattering_residual(sub_arr, s, inv.x);
      if (!(residual <= tol * std::max(1.0, scale)))
        throw Error(ErrorKind::SubsystemViolation, "cluster on " + format_subset(cl.support) +
                                                        " has sub-scattering residual " + std::to_string(residual));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SubsystemViolation) throw;
      throw Error(ErrorKind::SubsystemViolation, "cluster on " + format_subset(cl.support) + ": " + e.what());
    }
  }
  return true;
}

}  // namespace scatter

#endif  // SCATTER_CHY_HPP
