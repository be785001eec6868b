#ifndef SCATTER_ARRANGEMENT_HPP
#define SCATTER_ARRANGEMENT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scatter/error.hpp"
#include "scatter/rational.hpp"

namespace scatter {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Relative threshold below which a coordinate or linear form counts as zero.
inline constexpr double kDefaultZeroTol = 1e-8;

/// Coefficient matrix L of the affine forms l_0..l_n on C^d, with
/// (l_0(x), ..., l_n(x)) = (1, x_1, ..., x_d) * L.
///
/// L has d+1 rows and n+1 columns and must have full row rank. The derived
/// A ((n+1) x d, the last d rows transposed) and b (the negated first row)
/// satisfy L^T = (-b | A), so l_i(x) = (A x - b)_i.
class ArrangementMatrix {
 public:
  static ArrangementMatrix from_matrix(RationalMatrix L) {
    if (L.rows() < 2) throw Error(ErrorKind::MalformedInput, "L needs at least 2 rows (d >= 1)");
    if (L.cols() < 1) throw Error(ErrorKind::MalformedInput, "L has no columns");
    for (std::size_t j = 0; j < L.cols(); ++j) {
      bool zero = true;
      for (std::size_t i = 0; i < L.rows(); ++i) zero = zero && sgn(L(i, j)) == 0;
      if (zero) throw Error(ErrorKind::MalformedInput, "column " + std::to_string(j) + " of L is zero");
    }
    const auto r = rank(L);
    if (r < L.rows()) {
      throw Error(ErrorKind::RankDeficient, "rank(L) = " + std::to_string(r) + " < d+1 = " +
                                                std::to_string(L.rows()));
    }
    ArrangementMatrix arr;
    arr.L_ = std::move(L);
    arr.derive();
    return arr;
  }

  int d() const noexcept { return static_cast<int>(L_.rows()) - 1; }
  int n() const noexcept { return static_cast<int>(L_.cols()) - 1; }
  int ground_size() const noexcept { return static_cast<int>(L_.cols()); }

  const RationalMatrix& L() const noexcept { return L_; }
  const RationalMatrix& A() const noexcept { return A_; }
  const RationalVector& b() const noexcept { return b_; }

  /// Double-precision copies used by the numerical routines.
  const Eigen::MatrixXd& L_numeric() const noexcept { return L_num_; }
  /// A^T as a d x (n+1) matrix: row j holds the coefficients of x_{j+1}.
  const Eigen::MatrixXd& At_numeric() const noexcept { return At_num_; }

 private:
  void derive() {
    const std::size_t rows = L_.rows();
    const std::size_t cols = L_.cols();
    A_ = RationalMatrix(cols, rows - 1);
    b_.assign(cols, Rational(0));
    L_num_.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) L_num_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = L_(i, j).get_d();
    for (std::size_t j = 0; j < cols; ++j) {
      b_[j] = -L_(0, j);
      for (std::size_t i = 1; i < rows; ++i) A_(j, i - 1) = L_(i, j);
    }
    At_num_ = L_num_.bottomRows(static_cast<Eigen::Index>(rows - 1));
  }

  RationalMatrix L_;
  RationalMatrix A_;
  RationalVector b_;
  Eigen::MatrixXd L_num_;
  Eigen::MatrixXd At_num_;
};

/// A parsed instance document: the arrangement plus optional exponents u.
struct Instance {
  ArrangementMatrix arrangement;
  std::optional<CVector> u;
};

inline Rational json_to_rational(const nlohmann::json& value) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(mpz_class(std::to_string(value.get<long long>())));
  throw Error(ErrorKind::MalformedInput, "matrix entries must be rational strings, got " + value.dump());
}

/// Reads `{"d": int, "n": int, "L": [[rational-string]], "u": [[re, im]]}`.
inline Instance parse_instance(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedInput, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::MalformedInput, "instance document must be a JSON object");
  for (const char* key : {"d", "n", "L"}) {
    if (!doc.contains(key)) throw Error(ErrorKind::MalformedInput, std::string("missing field '") + key + "'");
  }
  if (!doc["d"].is_number_integer() || !doc["n"].is_number_integer())
    throw Error(ErrorKind::MalformedInput, "'d' and 'n' must be integers");
  const auto d = doc["d"].get<long long>();
  const auto n = doc["n"].get<long long>();
  if (d < 1 || n < 0) throw Error(ErrorKind::MalformedInput, "need d >= 1 and n >= 0");
  const auto& rows = doc["L"];
  if (!rows.is_array() || rows.size() != static_cast<std::size_t>(d + 1))
    throw Error(ErrorKind::MalformedInput, "'L' must have d+1 = " + std::to_string(d + 1) + " rows");
  std::vector<RationalVector> entries;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n + 1))
      throw Error(ErrorKind::MalformedInput, "every row of 'L' must have n+1 = " + std::to_string(n + 1) + " entries");
    RationalVector r;
    for (const auto& e : row) r.push_back(json_to_rational(e));
    entries.push_back(std::move(r));
  }
  Instance inst{ArrangementMatrix::from_matrix(RationalMatrix::from_rows(entries)), std::nullopt};
  if (doc.contains("u") && !doc["u"].is_null()) {
    const auto& u = doc["u"];
    if (!u.is_array() || u.size() != static_cast<std::size_t>(n + 1))
      throw Error(ErrorKind::MalformedInput, "'u' must have n+1 entries");
    CVector uv(n + 1);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto& e = u[i];
      if (e.is_number()) {
        uv(static_cast<Eigen::Index>(i)) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        uv(static_cast<Eigen::Index>(i)) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw Error(ErrorKind::MalformedInput, "entries of 'u' must be [re, im] pairs");
      }
      if (!std::isfinite(uv(static_cast<Eigen::Index>(i)).real()) || !std::isfinite(uv(static_cast<Eigen::Index>(i)).imag()))
        throw Error(ErrorKind::MalformedInput, "entries of 'u' must be finite");
    }
    inst.u = uv;
  }
  return inst;
}

inline ArrangementMatrix parse_arrangement(const std::string& text) { return parse_instance(text).arrangement; }

inline nlohmann::json arrangement_to_json(const ArrangementMatrix& arr) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < arr.L().rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < arr.L().cols(); ++j) row.push_back(format_rational(arr.L()(i, j)));
    rows.push_back(row);
  }
  return {{"d", arr.d()}, {"n", arr.n()}, {"L", rows}};
}

/// (l_0(x), ..., l_n(x)) = (1, x) * L.
inline CVector linear_forms_at(const ArrangementMatrix& arr, const CVector& x) {
  if (x.size() != arr.d()) throw Error(ErrorKind::MalformedInput, "point has wrong dimension");
  CVector homog(arr.d() + 1);
  homog(0) = 1.0;
  homog.tail(arr.d()) = x;
  return arr.L_numeric().cast<Complex>().transpose() * homog;
}

namespace detail {

inline void require_off_arrangement(const CVector& forms, double zero_tol) {
  const double scale = forms.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < forms.size(); ++i) {
    if (std::abs(forms(i)) <= zero_tol * scale || forms(i) == Complex(0.0)) {
      throw Error(ErrorKind::OnArrangement, "l_" + std::to_string(i) + "(x) vanishes");
    }
  }
}

}  // namespace detail

/// Gradient of sum_i u_i log l_i at x, i.e. A^T diag(u) (1 / l(x)).
inline CVector scattering_gradient(const ArrangementMatrix& arr, const CVector& u, const CVector& x,
                                   double zero_tol = kDefaultZeroTol) {
  const CVector forms = linear_forms_at(arr, x);
  detail::require_off_arrangement(forms, zero_tol);
  const CVector weighted = u.cwiseQuotient(forms);
  return arr.At_numeric().cast<Complex>() * weighted;
}

/// Max-norm of the scattering equations at x.
inline double scattering_residual(const ArrangementMatrix& arr, const CVector& u, const CVector& x,
                                  double zero_tol = kDefaultZeroTol) {
  const CVector g = scattering_gradient(arr, u, x, zero_tol);
  return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

/// H_jk = -sum_i u_i A_ij A_ik / l_i(x)^2.
inline CMatrix scattering_hessian(const ArrangementMatrix& arr, const CVector& u, const CVector& x,
                                  double zero_tol = kDefaultZeroTol) {
  const CVector forms = linear_forms_at(arr, x);
  detail::require_off_arrangement(forms, zero_tol);
  const CVector w = -u.cwiseQuotient(forms.cwiseProduct(forms));
  const CMatrix At = arr.At_numeric().cast<Complex>();
  return At * w.asDiagonal() * At.transpose();
}

struct HessianCheck {
  bool nondegenerate = false;
  /// |det H| divided by the product of the row max-norms of H.
  double condition = 0.0;
};

inline HessianCheck hessian_nondegenerate(const ArrangementMatrix& arr, const CVector& u, const CVector& x,
                                          double tol = 1e-10, double zero_tol = kDefaultZeroTol) {
  const CMatrix H = scattering_hessian(arr, u, x, zero_tol);
  double normalizer = 1.0;
  for (Eigen::Index j = 0; j < H.rows(); ++j) normalizer *= H.row(j).cwiseAbs().maxCoeff();
  const double det = std::abs(H.determinant());
  HessianCheck out;
  out.condition = normalizer > 0.0 ? det / normalizer : 0.0;
  out.nondegenerate = normalizer > 0.0 && det > tol * normalizer;
  return out;
}

/// phi(x) = (1/l_0(x) : ... : 1/l_n(x)), returned as an affine representative.
inline CVector phi(const ArrangementMatrix& arr, const CVector& x, double zero_tol = kDefaultZeroTol) {
  const CVector forms = linear_forms_at(arr, x);
  detail::require_off_arrangement(forms, zero_tol);
  return forms.cwiseInverse();
}

struct PhiInverse {
  CVector x;
  /// Relative max-norm residual of the overdetermined solve; certifies y in im(phi).
  double residual = 0.0;
};

/// Inverts phi on its image. Writing l_i(x) = 1/(lambda y_i) with z = lambda x
/// and mu = lambda turns membership into the linear system
/// A_i z - b_i mu = 1/y_i, solved in the least-squares sense on all n+1 rows.
inline PhiInverse phi_inverse(const ArrangementMatrix& arr, const CVector& y, double tol = 1e-8,
                              double zero_tol = kDefaultZeroTol) {
  if (y.size() != arr.ground_size()) throw Error(ErrorKind::MalformedInput, "point has wrong dimension");
  const double scale = y.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!(std::abs(y(i)) > zero_tol * scale)) {
      throw Error(ErrorKind::InconsistentPoint, "coordinate y_" + std::to_string(i) + " vanishes");
    }
  }
  const CVector rhs = y.cwiseInverse();
  // Columns (mu, z_1..z_d) of the system are exactly L^T.
  const CMatrix M = arr.L_numeric().transpose().cast<Complex>();
  const CVector w = M.colPivHouseholderQr().solve(rhs);
  const double resid = (M * w - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff();
  if (!(resid <= tol)) {
    throw Error(ErrorKind::InconsistentPoint, "least-squares residual " + std::to_string(resid) + " exceeds tolerance");
  }
  const Complex mu = w(0);
  if (!(std::abs(mu) > zero_tol * w.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::DegenerateScale, "scale mu vanishes; point lies at infinity");
  }
  return {w.tail(arr.d()) / mu, resid};
}

}  // namespace scatter

#endif  // SCATTER_ARRANGEMENT_HPP
