#ifndef SCATTER_IDEAL_HPP
#define SCATTER_IDEAL_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "scatter/arrangement.hpp"
#include "scatter/matroid.hpp"

namespace scatter {

/// alpha_i * prod_{j in C \ {i}} y_j, optionally times t^t_exponent.
struct CircuitTerm {
  int omitted = 0;
  Rational coeff;
  Subset monomial = 0;
  int t_exponent = 0;
};

/// f_C = sum_{i in C} alpha_i prod_{j in C \ {i}} y_j. Monomials are
/// squarefree, so they are stored as index sets.
struct CircuitPolynomial {
  Circuit circuit;
  std::vector<CircuitTerm> terms;
  bool deformed = false;

  int degree() const noexcept { return static_cast<int>(circuit.indices.size()) - 1; }
};

inline CircuitPolynomial circuit_polynomial(const Circuit& c) {
  CircuitPolynomial p{c, {}, false};
  for (std::size_t k = 0; k < c.indices.size(); ++k) {
    const int i = c.indices[k];
    p.terms.push_back(CircuitTerm{i, c.alpha[k], c.support & ~singleton(i), 0});
  }
  return p;
}

inline std::vector<CircuitPolynomial> circuit_polynomials(const std::vector<Circuit>& circs) {
  std::vector<CircuitPolynomial> out;
  out.reserve(circs.size());
  for (const auto& c : circs) out.push_back(circuit_polynomial(c));
  return out;
}

inline std::vector<CircuitPolynomial> circuit_polynomials(const ArrangementMatrix& arr) {
  return circuit_polynomials(circuits(arr));
}

/// Weight degeneration f_t = sum c_a t^{omega(f) - omega.a} y^a. For the term
/// omitting i the weight of its monomial is omega(C) - omega_i, so its
/// exponent is omega_i - min_{C} omega and the initial term omits the
/// omega-minimal element.
inline CircuitPolynomial deform(CircuitPolynomial poly, const WeightOrder& omega) {
  long long lowest = 0;
  bool first = true;
  for (const auto& term : poly.terms) {
    if (first || omega[term.omitted] < lowest) lowest = omega[term.omitted];
    first = false;
  }
  for (auto& term : poly.terms) term.t_exponent = static_cast<int>(omega[term.omitted] - lowest);
  poly.deformed = true;
  return poly;
}

inline std::vector<CircuitPolynomial> deform_all(const std::vector<CircuitPolynomial>& polys,
                                                 const WeightOrder& omega) {
  std::vector<CircuitPolynomial> out;
  out.reserve(polys.size());
  for (const auto& p : polys) out.push_back(deform(p, omega));
  return out;
}

/// Exact evaluation of a (possibly deformed) circuit polynomial.
inline Rational evaluate(const CircuitPolynomial& poly, const RationalVector& y, const Rational& t = 1) {
  Rational sum = 0;
  for (const auto& term : poly.terms) {
    Rational v = term.coeff;
    for (int e = 0; e < term.t_exponent; ++e) v *= t;
    for (int j : to_indices(term.monomial)) v *= y[static_cast<std::size_t>(j)];
    sum += v;
  }
  return sum;
}

inline std::string format_polynomial(const CircuitPolynomial& poly) {
  std::string out;
  for (const auto& term : poly.terms) {
    std::string coeff = term.coeff.get_str();
    if (!out.empty()) out += coeff.front() == '-' ? " - " : " + ";
    else if (coeff.front() == '-') out += "-";
    if (coeff.front() == '-') coeff.erase(0, 1);
    if (coeff != "1") out += coeff + "*";
    if (term.t_exponent > 0) out += "t^" + std::to_string(term.t_exponent) + "*";
    bool first = true;
    for (int j : to_indices(term.monomial)) {
      out += (first ? "" : "*") + std::string("y") + std::to_string(j);
      first = false;
    }
    if (first) out += "1";
  }
  return out;
}

/// J = in_omega(I(R_L)): minimal broken-circuit monomials and the minimal
/// primes <y_i : i in B^c>, one per nbc basis B.
struct InitialIdeal {
  std::vector<Subset> generators;
  std::vector<Subset> bases;
  std::vector<Subset> minimal_primes;
};

inline InitialIdeal initial_ideal(const ArrangementMatrix& arr, const WeightOrder& omega,
                                  const std::vector<Circuit>& circs) {
  InitialIdeal J;
  J.generators = broken_circuits(circs, omega);
  J.bases = nbc_bases(arr, omega, circs);
  const Subset ground = full_set(arr.ground_size());
  for (Subset b : J.bases) J.minimal_primes.push_back(ground & ~b);
  const int deg = reciprocal_degree(arr, circs);
  if (static_cast<int>(J.minimal_primes.size()) != deg) {
    throw Error(ErrorKind::InternalInconsistency, "number of minimal primes differs from the reciprocal degree");
  }
  return J;
}

inline InitialIdeal initial_ideal(const ArrangementMatrix& arr, const WeightOrder& omega) {
  return initial_ideal(arr, omega, circuits(arr));
}

}  // namespace scatter

#endif  // SCATTER_IDEAL_HPP
