#ifndef SCATTER_HILBERT_HPP
#define SCATTER_HILBERT_HPP

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scatter/arrangement.hpp"
#include "scatter/ideal.hpp"
#include "scatter/matroid.hpp"

namespace scatter {

/// Exponent vector of a monomial in y_0..y_n.
using Monomial = std::vector<int>;

/// Homogeneous polynomial with rational coefficients.
struct Polynomial {
  std::map<Monomial, Rational> terms;

  int degree() const {
    if (terms.empty()) return 0;
    int deg = 0;
    for (int e : terms.begin()->first) deg += e;
    return deg;
  }
  bool is_zero() const { return terms.empty(); }

  static Polynomial linear_form(const RationalVector& coeffs) {
    Polynomial p;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (sgn(coeffs[i]) == 0) continue;
      Monomial m(coeffs.size(), 0);
      m[i] = 1;
      p.terms[m] = coeffs[i];
    }
    return p;
  }
};

inline Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Subset monomial_support(const Monomial& m) {
  Subset s = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] > 0) s |= singleton(static_cast<int>(i));
  return s;
}

inline Monomial squarefree_monomial(Subset s, int vars) {
  Monomial m(static_cast<std::size_t>(vars), 0);
  for (int i : to_indices(s)) m[static_cast<std::size_t>(i)] = 1;
  return m;
}

/// All monomials of degree q in `vars` variables, in lexicographic order.
inline std::vector<Monomial> monomials_of_degree(int vars, int q) {
  std::vector<Monomial> out;
  if (q < 0) return out;
  Monomial cur(static_cast<std::size_t>(vars), 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == vars - 1) {
      cur[static_cast<std::size_t>(i)] = left;
      out.push_back(cur);
      return;
    }
    for (int e = left; e >= 0; --e) {
      cur[static_cast<std::size_t>(i)] = e;
      rec(i + 1, left - e);
    }
  };
  if (vars == 0) {
    if (q == 0) out.push_back(cur);
    return out;
  }
  rec(0, q);
  return out;
}

inline Rational binomial(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(b);
}

inline long long monomial_count(int vars, int q) {
  return binomial(vars + q - 1, q).get_num().get_si();
}

/// Face counts f_0..f_{d+1} of the broken-circuit complex (f_0 = 1 for the empty face).
inline std::vector<long long> nbc_face_counts(const ArrangementMatrix& arr, const WeightOrder& omega) {
  const auto broken = broken_circuits(circuits(arr), omega);
  std::vector<long long> f(static_cast<std::size_t>(arr.d() + 2), 0);
  for_each_nbc_face(arr.ground_size(), broken, [&](Subset face) {
    const auto k = static_cast<std::size_t>(cardinality(face));
    if (k >= f.size()) throw Error(ErrorKind::InternalInconsistency, "broken-circuit face larger than d+1");
    ++f[k];
  });
  return f;
}

/// HF of the Stanley-Reisner ring of the broken-circuit complex, which equals
/// HF of K[R_L]: sum over faces F of C(q-1, |F|-1).
inline long long hilbert_function_RL(const std::vector<long long>& faces, int q) {
  if (q < 0) return 0;
  if (q == 0) return 1;
  Rational total = 0;
  for (std::size_t k = 1; k < faces.size(); ++k) total += Rational(static_cast<long>(faces[k])) * binomial(q - 1, static_cast<long long>(k) - 1);
  return total.get_num().get_si();
}

inline long long hilbert_function_RL(const ArrangementMatrix& arr, const WeightOrder& omega, int q) {
  return hilbert_function_RL(nbc_face_counts(arr, omega), q);
}

inline long long hilbert_function_RL(const ArrangementMatrix& arr, int q) {
  return hilbert_function_RL(arr, WeightOrder::identity(arr.ground_size()), q);
}

/// Numerator h(t) of the Hilbert series h(t) / (1-t)^{d+1}:
/// h(t) = sum_k f_k t^k (1-t)^{d+1-k}.
inline std::vector<long long> hilbert_numerator(const std::vector<long long>& faces) {
  const auto D = static_cast<long long>(faces.size()) - 1;
  std::vector<long long> h(static_cast<std::size_t>(D + 1), 0);
  for (long long k = 0; k <= D; ++k) {
    for (long long j = 0; j <= D - k; ++j) {
      const long long c = binomial(D - k, j).get_num().get_si() * ((j % 2) ? -1 : 1);
      h[static_cast<std::size_t>(k + j)] += faces[static_cast<std::size_t>(k)] * c;
    }
  }
  return h;
}

/// deg h - d. Never positive, and zero exactly for connected matroids.
inline int hilbert_regularity_RL(const ArrangementMatrix& arr, const WeightOrder& omega) {
  const auto h = hilbert_numerator(nbc_face_counts(arr, omega));
  int deg = static_cast<int>(h.size()) - 1;
  while (deg > 0 && h[static_cast<std::size_t>(deg)] == 0) --deg;
  const int reg = deg - arr.d();
  const bool connected = is_connected(arr);
  if (reg > 0 || (reg == 0) != connected) {
    throw Error(ErrorKind::RegularityContradiction, "regularity " + std::to_string(reg) + " but the matroid is " +
                                                        (connected ? "connected" : "disconnected"));
  }
  return reg;
}

inline int hilbert_regularity_RL(const ArrangementMatrix& arr) {
  return hilbert_regularity_RL(arr, WeightOrder::identity(arr.ground_size()));
}

namespace detail {

using SparseRow = std::map<int, Rational>;

/// Row echelon form over sparse rows, keyed by leading column.
class SparseEchelon {
 public:
  SparseRow reduce(SparseRow row) const {
    while (!row.empty()) {
      const auto lead = row.begin()->first;
      const auto it = pivots_.find(lead);
      if (it == pivots_.end()) break;
      const Rational f = row.begin()->second;
      for (const auto& [c, v] : it->second) {
        auto& slot = row[c];
        slot -= f * v;
        if (sgn(slot) == 0) row.erase(c);
      }
    }
    return row;
  }

  bool insert(SparseRow row) {
    row = reduce(std::move(row));
    if (row.empty()) return false;
    const Rational lead = row.begin()->second;
    for (auto& [c, v] : row) v /= lead;
    pivots_.emplace(row.begin()->first, std::move(row));
    return true;
  }

  std::size_t rank() const noexcept { return pivots_.size(); }
  const std::map<int, SparseRow>& rows() const noexcept { return pivots_; }

 private:
  std::map<int, SparseRow> pivots_;
};

inline void add_scaled(SparseRow& into, const SparseRow& from, const Rational& f) {
  for (const auto& [c, v] : from) {
    auto& slot = into[c];
    slot += f * v;
    if (sgn(slot) == 0) into.erase(c);
  }
}

inline Polynomial circuit_as_polynomial(const CircuitPolynomial& p, int vars) {
  Polynomial out;
  for (const auto& term : p.terms) out.terms[squarefree_monomial(term.monomial, vars)] += term.coeff;
  return out;
}

/// The d linear forms of A^T diag(u) y.
inline std::vector<Polynomial> linear_generators(const ArrangementMatrix& arr, const RationalVector& u) {
  const auto At = arr.A().transpose();
  std::vector<Polynomial> out;
  for (std::size_t j = 0; j < At.rows(); ++j) {
    RationalVector coeffs(At.cols());
    for (std::size_t i = 0; i < At.cols(); ++i) coeffs[i] = At(j, i) * u[i];
    out.push_back(Polynomial::linear_form(coeffs));
  }
  return out;
}

}  // namespace detail

/// Rank data of the degree-q Macaulay matrix.
struct MacaulayResult {
  int q = 0;
  long long ambient = 0;  // number of degree-q monomials
  long long rows = 0;
  long long rank = 0;
  long long hilbert() const { return ambient - rank; }
};

inline constexpr long long kMaxMacaulayMonomials = 100000;

/// Exact rank of the Macaulay matrix of the circuit polynomials, the linear
/// forms A^T diag(u) y (if u is given) and h (if given) in degree q.
inline MacaulayResult macaulay_rank(const ArrangementMatrix& arr, const std::optional<RationalVector>& u, int q,
                                    const std::optional<Polynomial>& h = std::nullopt) {
  const int vars = arr.ground_size();
  MacaulayResult res;
  res.q = q;
  res.ambient = monomial_count(vars, q);
  if (res.ambient > kMaxMacaulayMonomials)
    throw Error(ErrorKind::MatrixTooLarge, std::to_string(res.ambient) + " monomials in degree " + std::to_string(q));
  if (u && static_cast<int>(u->size()) != vars) throw Error(ErrorKind::MalformedInput, "u has wrong length");
  const auto basis = monomials_of_degree(vars, q);
  std::map<Monomial, int> index;
  for (std::size_t k = 0; k < basis.size(); ++k) index.emplace(basis[k], static_cast<int>(k));

  std::vector<Polynomial> gens;
  for (const auto& p : circuit_polynomials(circuits(arr))) gens.push_back(detail::circuit_as_polynomial(p, vars));
  if (u)
    for (auto& g : detail::linear_generators(arr, *u)) gens.push_back(std::move(g));
  if (h && !h->is_zero()) gens.push_back(*h);

  detail::SparseEchelon ech;
  for (const auto& g : gens) {
    const int k = q - g.degree();
    if (k < 0 || g.is_zero()) continue;
    for (const auto& m : monomials_of_degree(vars, k)) {
      detail::SparseRow row;
      for (const auto& [mono, c] : g.terms) row[index.at(multiply(mono, m))] += c;
      ++res.rows;
      ech.insert(std::move(row));
      if (static_cast<long long>(ech.rank()) == res.ambient) break;
    }
  }
  res.rank = static_cast<long long>(ech.rank());
  return res;
}

/// HF of K[R_L] / I(L_u) (and h) in degree q.
inline long long quotient_hilbert_function(const ArrangementMatrix& arr, const RationalVector& u, int q,
                                           const std::optional<Polynomial>& h = std::nullopt) {
  return macaulay_rank(arr, u, q, h).hilbert();
}

/// Random rational with numerator and denominator of magnitude at most 100.
template <typename Rng>
Rational random_rational(Rng& rng) {
  std::uniform_int_distribution<int> num(-100, 100);
  std::uniform_int_distribution<int> den(1, 100);
  int p = 0;
  while (p == 0) p = num(rng);
  Rational r(p, den(rng));
  r.canonicalize();
  return r;
}

template <typename Rng>
RationalVector random_rational_vector(int size, Rng& rng) {
  RationalVector u(static_cast<std::size_t>(size));
  for (auto& x : u) x = random_rational(rng);
  return u;
}

/// Quotient HF for generic u, taken as the common value of two independent
/// random rational specializations.
inline long long generic_quotient_hilbert_function(const ArrangementMatrix& arr, int q,
                                                   const std::optional<Polynomial>& h = std::nullopt,
                                                   std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  const auto u1 = random_rational_vector(arr.ground_size(), rng);
  const auto u2 = random_rational_vector(arr.ground_size(), rng);
  const auto a = quotient_hilbert_function(arr, u1, q, h);
  const auto b = quotient_hilbert_function(arr, u2, q, h);
  if (a != b)
    throw Error(ErrorKind::SpecializationMismatch,
                "two specializations of u give " + std::to_string(a) + " and " + std::to_string(b));
  return a;
}

/// Normal forms modulo I(R_L) in degree q. The circuit polynomials form a
/// universal Groebner basis; the standard monomials are those whose support
/// contains no broken circuit.
class NormalForm {
 public:
  NormalForm(const ArrangementMatrix& arr, const WeightOrder& omega, int q)
      : vars_(arr.ground_size()), q_(q), circuits_(circuits(arr)), omega_(omega) {
    for (const auto& c : circuits_) broken_.push_back(c.support & ~singleton(omega_.argmin(c.support)));
    for (const auto& m : monomials_of_degree(vars_, q)) {
      if (is_standard(m)) {
        index_.emplace(m, static_cast<int>(standard_.size()));
        standard_.push_back(m);
      }
    }
  }

  const std::vector<Monomial>& standard() const noexcept { return standard_; }
  int degree() const noexcept { return q_; }

  bool is_standard(const Monomial& m) const {
    const Subset s = monomial_support(m);
    for (Subset bc : broken_)
      if (is_subset(bc, s)) return false;
    return true;
  }

  /// Coordinates of the class of m in the standard basis.
  const detail::SparseRow& of(const Monomial& m) {
    if (auto it = memo_.find(m); it != memo_.end()) return it->second;
    detail::SparseRow out;
    std::size_t k = 0;
    for (; k < broken_.size(); ++k)
      if (is_subset(broken_[k], monomial_support(m))) break;
    if (k == broken_.size()) {
      out[index_.at(m)] = 1;
    } else {
      // y^{C \ i0} = -(1/alpha_{i0}) sum_{i != i0} alpha_i y^{C \ i}, i0 the omega-minimal element.
      const auto& c = circuits_[k];
      const int i0 = omega_.argmin(c.support);
      Monomial rest = m;
      for (int j : to_indices(broken_[k])) --rest[static_cast<std::size_t>(j)];
      Rational lead;
      for (std::size_t t = 0; t < c.indices.size(); ++t)
        if (c.indices[t] == i0) lead = c.alpha[t];
      for (std::size_t t = 0; t < c.indices.size(); ++t) {
        if (c.indices[t] == i0) continue;
        const Monomial next = multiply(rest, squarefree_monomial(c.support & ~singleton(c.indices[t]), vars_));
        const detail::SparseRow sub = of(next);
        detail::add_scaled(out, sub, -c.alpha[t] / lead);
      }
    }
    return memo_.emplace(m, std::move(out)).first->second;
  }

  detail::SparseRow of(const Polynomial& p, const Monomial& times) {
    detail::SparseRow out;
    for (const auto& [mono, c] : p.terms) detail::add_scaled(out, of(multiply(mono, times)), c);
    return out;
  }

 private:
  int vars_;
  int q_;
  std::vector<Circuit> circuits_;
  WeightOrder omega_;
  std::vector<Subset> broken_;
  std::vector<Monomial> standard_;
  std::map<Monomial, int> index_;
  std::map<Monomial, detail::SparseRow> memo_;
};

/// Univariate polynomial with rational coefficients, lowest degree first.
struct UnivariatePolynomial {
  std::vector<Rational> coeffs;

  int degree() const {
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
      if (sgn(coeffs[static_cast<std::size_t>(k)]) != 0) return k;
    return -1;
  }

  Rational operator()(const Rational& t) const {
    Rational v = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * t + *it;
    return v;
  }
};

/// Exact interpolation through (xs[k], ys[k]) by Newton divided differences.
inline UnivariatePolynomial interpolate(const std::vector<Rational>& xs, std::vector<Rational> ys) {
  const std::size_t n = xs.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t k = n - 1; k >= level; --k) ys[k] = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - level]);
  UnivariatePolynomial p;
  p.coeffs.assign(n, Rational(0));
  // Horner on the Newton form: p = ys[n-1]; p = p * (t - xs[k]) + ys[k].
  for (std::size_t k = n; k-- > 0;) {
    std::vector<Rational> next(n, Rational(0));
    for (std::size_t j = 0; j + 1 < n; ++j) {
      next[j + 1] += p.coeffs[j];
      next[j] -= p.coeffs[j] * xs[k];
    }
    next[0] += ys[k];
    p.coeffs = std::move(next);
  }
  return p;
}

/// Complex roots of a polynomial as eigenvalues of its companion matrix.
inline std::vector<Complex> polynomial_roots(const UnivariatePolynomial& p) {
  const int deg = p.degree();
  if (deg < 1) return {};
  const Rational lead = p.coeffs[static_cast<std::size_t>(deg)];
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
  for (int k = 1; k < deg; ++k) C(k, k - 1) = 1.0;
  for (int k = 0; k < deg; ++k) C(k, deg - 1) = -Rational(p.coeffs[static_cast<std::size_t>(k)] / lead).get_d();
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  std::vector<Complex> roots;
  for (int k = 0; k < deg; ++k) roots.push_back(es.eigenvalues()(k));
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

struct Eliminant {
  int q = 0;
  int size = 0;  // HF_{K[R_L]}(q)
  int degree = 0;  // deg R_L
  UnivariatePolynomial determinant;  // det M(t), before normalization
  UnivariatePolynomial monic;
  std::vector<Complex> roots;
};

/// The univariate eliminant whose roots are the values of h2/h1 on
/// R_L meets L_u. M(t) has HF_{K[R_L]}(q) columns (standard monomials); its
/// top rows span I(L_u)_q modulo I(R_L), the remaining deg R_L rows are
/// (h2 - t h1) times chosen monomials of degree q - 1.
inline Eliminant eliminant(const ArrangementMatrix& arr, const RationalVector& u, const Polynomial& h1,
                           const Polynomial& h2, std::optional<int> q_opt = std::nullopt, std::uint64_t seed = 1,
                           std::optional<WeightOrder> omega = std::nullopt) {
  const int vars = arr.ground_size();
  const int q = q_opt.value_or(arr.d() + 1);
  if (h1.degree() != 1 || h2.degree() != 1) throw Error(ErrorKind::MalformedInput, "h1 and h2 must be linear forms");
  if (static_cast<int>(u.size()) != vars) throw Error(ErrorKind::MalformedInput, "u has wrong length");
  if (q < 1) throw Error(ErrorKind::MalformedInput, "q must be positive");
  if (monomial_count(vars, q) > kMaxMacaulayMonomials)
    throw Error(ErrorKind::MatrixTooLarge, "too many monomials in degree " + std::to_string(q));
  const WeightOrder w = omega.value_or(WeightOrder::identity(vars));
  NormalForm nf(arr, w, q);
  const int size = static_cast<int>(nf.standard().size());
  const int deg = reciprocal_degree(arr);

  detail::SparseEchelon top;
  const auto lower = monomials_of_degree(vars, q - 1);
  for (const auto& g : detail::linear_generators(arr, u))
    for (const auto& m : lower) top.insert(nf.of(g, m));
  if (static_cast<int>(top.rank()) != size - deg) {
    throw Error(ErrorKind::InternalInconsistency, "I(L_u) has dimension " + std::to_string(top.rank()) +
                                                      " modulo I(R_L) in degree " + std::to_string(q) + ", expected " +
                                                      std::to_string(size - deg));
  }

  // Greedy choice of the t-dependent rows at a random rational t0. If no
  // choice is independent at several random t0, det M(t) vanishes identically.
  std::mt19937_64 rng(seed);
  std::vector<std::pair<detail::SparseRow, detail::SparseRow>> chosen;  // (h2 m, h1 m)
  Rational t0;
  for (int attempt = 0; attempt < 3 && static_cast<int>(chosen.size()) != deg; ++attempt) {
    t0 = random_rational(rng);
    chosen.clear();
    detail::SparseEchelon probe = top;
    for (const auto& m : lower) {
      if (static_cast<int>(chosen.size()) == deg) break;
      auto a = nf.of(h2, m);
      auto b = nf.of(h1, m);
      detail::SparseRow row = a;
      detail::add_scaled(row, b, -t0);
      if (probe.insert(row)) chosen.emplace_back(std::move(a), std::move(b));
    }
  }
  if (static_cast<int>(chosen.size()) != deg)
    throw Error(ErrorKind::DegreeCollapse, "det M(t) vanishes identically: h2 - t h1 vanishes at a point of the "
                                           "intersection for every t");

  auto matrix_at = [&](const Rational& t) {
    RationalMatrix M(static_cast<std::size_t>(size), static_cast<std::size_t>(size));
    std::size_t r = 0;
    for (const auto& [lead, row] : top.rows()) {
      for (const auto& [c, v] : row) M(r, static_cast<std::size_t>(c)) = v;
      ++r;
    }
    for (const auto& [a, b] : chosen) {
      for (const auto& [c, v] : a) M(r, static_cast<std::size_t>(c)) += v;
      for (const auto& [c, v] : b) M(r, static_cast<std::size_t>(c)) -= t * v;
      ++r;
    }
    return M;
  };
  if (sgn(determinant(matrix_at(t0))) == 0)
    throw Error(ErrorKind::SingularSelection, "selected rows are dependent at t0 = " + t0.get_str());
  std::vector<Rational> xs, ys;
  for (int k = 0; k <= deg; ++k) {
    xs.emplace_back(k);
    ys.push_back(determinant(matrix_at(xs.back())));
  }
  Eliminant out;
  out.q = q;
  out.size = size;
  out.degree = deg;
  out.determinant = interpolate(xs, ys);
  const int got = out.determinant.degree();
  if (got < 0) throw Error(ErrorKind::DegreeCollapse, "det M(t) vanishes identically");
  if (got < deg)
    throw Error(ErrorKind::DegreeCollapse, "det M(t) has degree " + std::to_string(got) + " < " + std::to_string(deg) +
                                               ": h1 vanishes at a point of the intersection");
  out.monic = out.determinant;
  const Rational lead = out.monic.coeffs[static_cast<std::size_t>(got)];
  for (auto& c : out.monic.coeffs) c /= lead;
  out.monic.coeffs.resize(static_cast<std::size_t>(got + 1));
  out.roots = polynomial_roots(out.monic);
  return out;
}

}  // namespace scatter

#endif  // SCATTER_HILBERT_HPP
