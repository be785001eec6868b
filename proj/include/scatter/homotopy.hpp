#ifndef SCATTER_HOMOTOPY_HPP
#define SCATTER_HOMOTOPY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "scatter/arrangement.hpp"
#include "scatter/ideal.hpp"
#include "scatter/matroid.hpp"

namespace scatter {

/// Path-tracker and endpoint-processing parameters.
inline constexpr double kRelaxedCorrectorTol = 1e-10;

struct TrackerConfig {
  double corrector_tol = 1e-12;  // relative Newton step size
  int max_newton_iterations = 3;
  double initial_step = 0.02;
  double max_step = 0.1;
  double min_step = 1e-14;
  int max_steps = 10000;
  double endgame_gap = 1e-6;       // tracking pauses at tau = 1 - gap before the final approach
  double zero_tol = kDefaultZeroTol;
  double cluster_tol = 1e-4;
  double verify_tol = 1e-8;        // full overdetermined system at t = 1
  double divergence_bound = 1e10;  // max-norm in patch coordinates
};

struct SolveConfig {
  TrackerConfig tracker;
  std::uint64_t seed = 1;
  std::optional<WeightOrder> omega;
  std::optional<CMatrix> A0;
  std::optional<Complex> gamma;
  bool return_boundary = true;
  int threads = 1;
};

enum class PathStatus { Success, Singular, Diverged, MinStep, MaxSteps };

inline std::string_view to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Success: return "success";
    case PathStatus::Singular: return "singular";
    case PathStatus::Diverged: return "diverged";
    case PathStatus::MinStep: return "min_step";
    case PathStatus::MaxSteps: return "max_steps";
  }
  return "unknown";
}

inline bool is_failure(PathStatus s) {
  return s == PathStatus::Diverged || s == PathStatus::MinStep || s == PathStatus::MaxSteps;
}

/// One continuation path. Success means the path reached t = 1 and Newton on
/// the square system converged there. Singular means it reached
/// t = 1 - endgame_gap but Newton at t = 1 stalled (a multiple endpoint).
struct TrackedPath {
  CVector start;
  PathStatus status = PathStatus::MaxSteps;
  CVector endpoint;
  double t_reached = 0.0;
  double newton_residual = 0.0;
  int steps_taken = 0;
  bool retried = false;  // first attempt failed; tracked again with cautious steps
};

namespace detail {

struct CompiledTerm {
  Complex coeff;
  int t_exp = 0;
  std::vector<int> vars;
};

inline Complex ipow(Complex t, int e) {
  Complex r(1.0);
  for (int k = 0; k < e; ++k) r *= t;
  return r;
}

inline double max_norm(const CVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace detail

/// H(y, t): the straight-line homotopy (1-t) A0 y + t A^T diag(u) y on the
/// linear part, the weight-deformed circuit polynomials squared up by R, and
/// the affine patch v.y = 1. The path parameter is tau in [0, 1] with
/// t(tau) = tau + gamma tau (1 - tau).
class HomotopySystem {
 public:
  HomotopySystem(CMatrix A0, CMatrix A_target, std::vector<CircuitPolynomial> deformed, CMatrix R, CVector v,
                 Complex gamma)
      : A0_(std::move(A0)),
        A_target_(std::move(A_target)),
        deformed_(std::move(deformed)),
        R_(std::move(R)),
        v_(std::move(v)),
        gamma_(gamma) {
    size_ = static_cast<int>(v_.size());
    d_ = static_cast<int>(A0_.rows());
    for (const auto& p : deformed_) {
      std::vector<detail::CompiledTerm> terms;
      for (const auto& term : p.terms)
        terms.push_back({Complex(term.coeff.get_d(), 0.0), term.t_exponent, to_indices(term.monomial)});
      polys_.push_back(std::move(terms));
    }
    if (R_.rows() != size_ - 1 - d_ || R_.cols() != static_cast<Eigen::Index>(polys_.size())) {
      throw Error(ErrorKind::InternalInconsistency, "square-up matrix has the wrong shape");
    }
  }

  int size() const noexcept { return size_; }
  int d() const noexcept { return d_; }
  const CMatrix& A0() const noexcept { return A0_; }
  const CMatrix& A_target() const noexcept { return A_target_; }
  const CMatrix& R() const noexcept { return R_; }
  const CVector& patch() const noexcept { return v_; }
  Complex gamma() const noexcept { return gamma_; }
  const std::vector<CircuitPolynomial>& deformed_polys() const noexcept { return deformed_; }

  Complex t_of(double tau) const { return tau + gamma_ * tau * (1.0 - tau); }
  Complex dt_dtau(double tau) const { return 1.0 + gamma_ * (1.0 - 2.0 * tau); }

  /// Values, y-Jacobian and t-derivative of the circuit polynomials.
  void eval_polys(const CVector& y, Complex t, CVector& f, CMatrix& fy, CVector& ft) const {
    const auto m = static_cast<Eigen::Index>(polys_.size());
    f.setZero(m);
    fy.setZero(m, size_);
    ft.setZero(m);
    for (Eigen::Index c = 0; c < m; ++c) {
      for (const auto& term : polys_[static_cast<std::size_t>(c)]) {
        const Complex tp = detail::ipow(t, term.t_exp);
        Complex mono(1.0);
        for (int j : term.vars) mono *= y(j);
        f(c) += term.coeff * tp * mono;
        if (term.t_exp > 0) ft(c) += term.coeff * static_cast<double>(term.t_exp) * detail::ipow(t, term.t_exp - 1) * mono;
        for (int k : term.vars) {
          Complex partial(1.0);
          for (int j : term.vars)
            if (j != k) partial *= y(j);
          fy(c, k) += term.coeff * tp * partial;
        }
      }
    }
  }

  /// Square system at parameter tau: H, dH/dy and dH/dtau.
  void evaluate(const CVector& y, double tau, CVector& H, CMatrix& Hy, CVector& Htau) const {
    const Complex t = t_of(tau);
    const Complex dt = dt_dtau(tau);
    H.resize(size_);
    Hy.resize(size_, size_);
    Htau.resize(size_);
    const CMatrix lin = (1.0 - t) * A0_ + t * A_target_;
    H.head(d_) = lin * y;
    Hy.topRows(d_) = lin;
    Htau.head(d_) = ((A_target_ - A0_) * y) * dt;
    const int sq = size_ - 1 - d_;
    if (sq > 0) {
      CVector f;
      CMatrix fy;
      CVector ft;
      eval_polys(y, t, f, fy, ft);
      H.segment(d_, sq) = R_ * f;
      Hy.middleRows(d_, sq) = R_ * fy;
      Htau.segment(d_, sq) = (R_ * ft) * dt;
    }
    H(size_ - 1) = v_.dot(y) - 1.0;  // Eigen's dot conjugates the first argument
    Hy.row(size_ - 1) = v_.conjugate().transpose();
    Htau(size_ - 1) = 0.0;
  }

  /// Relative residual of the full overdetermined target system at t = 1:
  /// every linear row and every circuit polynomial, each scaled by its natural size.
  double target_residual(const CVector& y) const {
    const double ynorm = std::max(detail::max_norm(y), 1e-300);
    double worst = 0.0;
    const CVector lin = A_target_ * y;
    for (Eigen::Index j = 0; j < A_target_.rows(); ++j) {
      const double scale = A_target_.row(j).cwiseAbs().sum() * ynorm;
      if (scale > 0.0) worst = std::max(worst, std::abs(lin(j)) / scale);
    }
    for (const auto& terms : polys_) {
      Complex val(0.0);
      double scale = 0.0;
      for (const auto& term : terms) {
        Complex mono(1.0);
        for (int j : term.vars) mono *= y(j);
        val += term.coeff * mono;
        scale += std::abs(term.coeff) * std::pow(ynorm, static_cast<double>(term.vars.size()));
      }
      if (scale > 0.0) worst = std::max(worst, std::abs(val) / scale);
    }
    return worst;
  }

 private:
  int size_ = 0;
  int d_ = 0;
  CMatrix A0_;
  CMatrix A_target_;
  std::vector<CircuitPolynomial> deformed_;
  std::vector<std::vector<detail::CompiledTerm>> polys_;
  CMatrix R_;
  CVector v_;
  Complex gamma_;
};

namespace detail {

template <typename Rng>
Complex complex_gaussian(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

template <typename Rng>
CMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex_gaussian(rng);
  return m;
}

/// Arc parameter: |gamma| <= 0.3 with the imaginary part dominating.
template <typename Rng>
Complex random_gamma(Rng& rng) {
  std::uniform_real_distribution<double> re(-0.1, 0.1);
  std::uniform_real_distribution<double> im(0.1, 0.25);
  std::bernoulli_distribution flip(0.5);
  const double a = re(rng);
  const double b = im(rng);
  return {a, flip(rng) ? b : -b};
}

}  // namespace detail

/// A^T diag(u) as a d x (n+1) complex matrix.
inline CMatrix target_linear_part(const ArrangementMatrix& arr, const CVector& u) {
  return arr.At_numeric().cast<Complex>() * u.asDiagonal();
}

/// Diagnostics of the start system A0 y = 0 on V(J).
struct StartDiagnostics {
  int components = 0;
  int rank_deficient = 0;      // A0 restricted to B has rank < d
  int vanishing_coordinate = 0;  // kernel vector vanishes on part of B
  int coincident = 0;          // points shared with another component
  int regular = 0;
  std::vector<int> multiplicities;  // per distinct start point
  bool all_regular() const { return regular == components; }
};

struct StartPoints {
  std::vector<CVector> points;
  StartDiagnostics diagnostics;
};

/// Kernel vector of A0 restricted to each nbc basis B, zero on B^c and
/// scaled to v.y = 1. Also reports why any start point fails to be regular.
inline StartPoints compute_start_points(const CMatrix& A0, const InitialIdeal& J, const CVector& v,
                                        double zero_tol = kDefaultZeroTol) {
  StartPoints out;
  auto& diag = out.diagnostics;
  const auto size = v.size();
  diag.components = static_cast<int>(J.bases.size());
  std::vector<bool> ok(J.bases.size(), true);
  for (std::size_t k = 0; k < J.bases.size(); ++k) {
    const auto cols = to_indices(J.bases[k]);
    CMatrix sub(A0.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = A0.col(cols[c]);
    Eigen::JacobiSVD<CMatrix> svd(sub, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 1.0;
    const double smin = sv.size() > 0 ? sv(sv.size() - 1) : 1.0;
    CVector kern = svd.matrixV().col(static_cast<Eigen::Index>(cols.size()) - 1);
    if (sub.rows() > 0 && smin <= 1e-10 * smax) {
      ++diag.rank_deficient;
      ok[k] = false;
    }
    CVector y = CVector::Zero(size);
    for (std::size_t c = 0; c < cols.size(); ++c) y(cols[c]) = kern(static_cast<Eigen::Index>(c));
    if (ok[k]) {
      const double scale = detail::max_norm(kern);
      for (Eigen::Index c = 0; c < kern.size(); ++c)
        if (std::abs(kern(c)) <= 1e-6 * scale) {
          ++diag.vanishing_coordinate;
          ok[k] = false;
          break;
        }
    }
    const Complex vy = v.dot(y);
    if (std::abs(vy) > 1e-12) y /= vy;
    out.points.push_back(y);
  }
  // Coincident points: two components meeting the linear space at one point.
  std::vector<int> group(out.points.size(), -1);
  int groups = 0;
  for (std::size_t a = 0; a < out.points.size(); ++a) {
    if (group[a] >= 0) continue;
    group[a] = groups;
    int mult = 1;
    for (std::size_t b = a + 1; b < out.points.size(); ++b) {
      if (group[b] >= 0) continue;
      const double dist = detail::max_norm(out.points[a] - out.points[b]);
      const double scale = std::max(detail::max_norm(out.points[a]), 1.0);
      if (dist <= 1e-6 * scale) {
        group[b] = groups;
        ++mult;
      }
    }
    diag.multiplicities.push_back(mult);
    ++groups;
  }
  for (std::size_t a = 0; a < out.points.size(); ++a) {
    if (diag.multiplicities[static_cast<std::size_t>(group[a])] > 1) {
      ++diag.coincident;
      ok[a] = false;
    }
  }
  diag.regular = static_cast<int>(std::count(ok.begin(), ok.end(), true));
  (void)zero_tol;
  return out;
}

/// Start solutions on V(J). Throws StartDegenerate when any start point is
/// not regular for the given A0.
inline std::vector<CVector> start_solutions(const CMatrix& A0, const InitialIdeal& J, const CVector& v) {
  auto sp = compute_start_points(A0, J, v);
  if (!sp.diagnostics.all_regular()) {
    const auto& d = sp.diagnostics;
    throw Error(ErrorKind::StartDegenerate,
                std::to_string(d.components - d.regular) + " of " + std::to_string(d.components) +
                    " start points are not regular (rank deficient: " + std::to_string(d.rank_deficient) +
                    ", vanishing coordinates: " + std::to_string(d.vanishing_coordinate) +
                    ", coincident: " + std::to_string(d.coincident) + ")");
  }
  return std::move(sp.points);
}

namespace detail {

/// Newton on the square system at fixed tau. Returns true on convergence.
inline bool newton(const HomotopySystem& H, CVector& y, double tau, int max_iter, double tol, double* residual,
                   int* iterations = nullptr) {
  CVector F;
  CMatrix J;
  CVector Ft;
  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    H.evaluate(y, tau, F, J, Ft);
    Eigen::PartialPivLU<CMatrix> lu(J);
    const CVector dy = lu.solve(-F);
    if (!dy.allFinite()) return false;
    y += dy;
    const double step = max_norm(dy);
    if (iterations) *iterations = it + 1;
    if (step <= tol * std::max(1.0, max_norm(y))) {
      if (residual) {
        H.evaluate(y, tau, F, J, Ft);
        *residual = max_norm(F);
      }
      return true;
    }
    if (it > 0 && step > 0.5 * prev) return false;
    prev = step;
  }
  return false;
}

/// dy/dtau = -Hy^{-1} Htau.
inline bool tangent(const HomotopySystem& H, const CVector& y, double tau, CVector& out) {
  CVector F;
  CMatrix J;
  CVector Ft;
  H.evaluate(y, tau, F, J, Ft);
  out = Eigen::PartialPivLU<CMatrix>(J).solve(-Ft);
  return out.allFinite();
}

/// Predictor-corrector from (y, tau) up to tau_end. Returns the status reached
/// (Success meaning tau_end was attained).
inline PathStatus advance(const HomotopySystem& H, CVector& y, double& tau, double tau_end, double& step,
                          int& steps, const TrackerConfig& cfg) {
  int streak = 0;
  while (tau < tau_end) {
    if (steps >= cfg.max_steps) return PathStatus::MaxSteps;
    ++steps;
    const double h = std::min(step, tau_end - tau);
    CVector k1, k2, k3, k4;
    bool ok = tangent(H, y, tau, k1) && tangent(H, y + 0.5 * h * k1, tau + 0.5 * h, k2) &&
              tangent(H, y + 0.5 * h * k2, tau + 0.5 * h, k3) && tangent(H, y + h * k3, tau + h, k4);
    CVector next;
    if (ok) {
      next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      double res = 0.0;
      ok = newton(H, next, tau + h, cfg.max_newton_iterations, cfg.corrector_tol, &res);
    }
    if (ok) {
      y = next;
      tau = (h == tau_end - tau) ? tau_end : tau + h;
      if (max_norm(y) > cfg.divergence_bound) return PathStatus::Diverged;
      if (++streak >= 4) {
        step = std::min(1.5 * step, cfg.max_step);
        streak = 0;
      }
    } else {
      step *= 0.5;
      streak = 0;
      if (step < cfg.min_step) return PathStatus::MinStep;
    }
  }
  return PathStatus::Success;
}

}  // namespace detail

/// Tracks one start point from tau = 0 to tau = 1. The path first runs to
/// tau = 1 - endgame_gap; the final approach to 1 either converges (regular
/// endpoint) or stalls, in which case the point at 1 - endgame_gap is kept
/// and the path is marked Singular.
inline TrackedPath track_one(const HomotopySystem& H, const CVector& start, const TrackerConfig& cfg) {
  TrackedPath path;
  path.start = start;
  CVector y = start;
  double tau = 0.0;
  double step = cfg.initial_step;
  int steps = 0;
  const double pause = std::max(0.0, 1.0 - cfg.endgame_gap);
  auto status = detail::advance(H, y, tau, pause, step, steps, cfg);
  path.steps_taken = steps;
  if (status != PathStatus::Success) {
    path.status = status;
    path.endpoint = y;
    path.t_reached = tau;
    return path;
  }
  const CVector paused = y;
  double tau_final = tau;
  TrackerConfig endgame = cfg;
  endgame.min_step = std::max(cfg.min_step, cfg.endgame_gap * 1e-6);
  status = detail::advance(H, y, tau_final, 1.0, step, steps, endgame);
  path.steps_taken = steps;
  double residual = 0.0;
  if (status == PathStatus::Success &&
      detail::newton(H, y, 1.0, std::max(3, cfg.max_newton_iterations), cfg.corrector_tol, &residual)) {
    path.status = PathStatus::Success;
    path.endpoint = y;
    path.t_reached = 1.0;
    path.newton_residual = residual;
    return path;
  }
  if (status == PathStatus::MaxSteps || status == PathStatus::Diverged) {
    path.status = status;
    path.endpoint = y;
    path.t_reached = tau_final;
    return path;
  }
  path.status = PathStatus::Singular;
  path.endpoint = paused;
  path.t_reached = pause;
  CVector F;
  CMatrix J;
  CVector Ft;
  H.evaluate(paused, 1.0, F, J, Ft);
  path.newton_residual = detail::max_norm(F);
  return path;
}

namespace detail {

inline Subset numerical_support(const CVector& y, double zero_tol) {
  const double scale = max_norm(y);
  Subset s = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (std::abs(y(i)) > zero_tol * scale) s |= singleton(static_cast<int>(i));
  return s;
}

inline TrackerConfig cautious(const TrackerConfig& cfg, double factor) {
  TrackerConfig c = cfg;
  c.initial_step = cfg.initial_step / factor;
  c.max_step = cfg.max_step / factor;
  c.max_newton_iterations = std::max(6, cfg.max_newton_iterations);
  c.max_steps = static_cast<int>(std::min<double>(cfg.max_steps * factor, 1e8));
  return c;
}

/// Paths that left their own branch: interior endpoints that coincide with
/// another path's, or that solve the square system but not the full one.
inline std::vector<std::size_t> jump_suspects(const HomotopySystem& H, const std::vector<TrackedPath>& paths,
                                              const TrackerConfig& cfg) {
  std::vector<std::size_t> interior;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto& p = paths[k];
    if (p.status == PathStatus::Success &&
        numerical_support(p.endpoint, cfg.zero_tol) == full_set(static_cast<int>(p.endpoint.size())))
      interior.push_back(k);
  }
  std::vector<bool> suspect(paths.size(), false);
  for (std::size_t a = 0; a < interior.size(); ++a) {
    const CVector& ya = paths[interior[a]].endpoint;
    if (!(H.target_residual(ya) <= cfg.verify_tol)) suspect[interior[a]] = true;
    for (std::size_t b = a + 1; b < interior.size(); ++b) {
      if (max_norm(ya - paths[interior[b]].endpoint) <= cfg.cluster_tol * std::max(1.0, max_norm(ya)))
        suspect[interior[a]] = suspect[interior[b]] = true;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < paths.size(); ++k)
    if (suspect[k]) out.push_back(k);
  return out;
}

}  // namespace detail

/// Shorter steps by `factor` and more corrector iterations; on failure the
/// corrector tolerance is relaxed to the noise floor of an ill-conditioned
/// Jacobian.
inline TrackedPath track_cautiously(const HomotopySystem& H, const CVector& start, const TrackerConfig& cfg,
                                    double factor) {
  auto cautious = detail::cautious(cfg, factor);
  auto path = track_one(H, start, cautious);
  if (is_failure(path.status)) {
    cautious.corrector_tol = std::max(cfg.corrector_tol, kRelaxedCorrectorTol);
    path = track_one(H, start, cautious);
  }
  path.retried = true;
  return path;
}

/// track_one, falling back to track_cautiously on failure.
inline TrackedPath track_with_retry(const HomotopySystem& H, const CVector& start, const TrackerConfig& cfg) {
  auto path = track_one(H, start, cfg);
  return is_failure(path.status) ? track_cautiously(H, start, cfg, 10) : path;
}

/// A critical point of the log-likelihood in affine coordinates.
struct AffinePoint {
  CVector x;
  double residual = 0.0;  // max-norm of the scattering equations at x
  bool hessian_ok = false;
};

struct InteriorSolution {
  AffinePoint point;
  CVector y;  // endpoint in patch coordinates
  double hessian_condition = 0.0;
  std::vector<int> paths;  // more than one only if paths merged
};

/// Endpoints on the boundary stratum of one flat, grouped by distance.
struct BoundaryCluster {
  Subset support = 0;
  CVector representative;
  int multiplicity = 0;  // observed: number of paths ending here
  std::vector<int> paths;
  bool type_ii = false;
  double residual = 0.0;  // full system on the stratum
};

struct PathStats {
  int total = 0;
  std::map<std::string, int> by_status;
  int unverified = 0;  // endpoint failed the overdetermined check at t = 1
  int retried = 0;
  int failed() const {
    int f = 0;
    for (const auto& [k, v] : by_status)
      if (k != "success" && k != "singular") f += v;
    return f;
  }
};

struct CountsCheck {
  int interior = 0;
  int ml_degree = -1;  // -1 when the arrangement is not essential
  int paths = 0;
  int reciprocal_degree = 0;
  int boundary_paths = 0;
  bool interior_matches = false;
  bool paths_match = false;
};

/// Wall-clock seconds per phase of track_all.
struct PhaseTimings {
  double combinatorics = 0.0;  // circuits, flats, initial ideal
  double start = 0.0;          // start system
  double tracking = 0.0;
  double endpoints = 0.0;      // refinement, classification, certification
};

struct SolutionReport {
  std::vector<InteriorSolution> interior;
  std::vector<BoundaryCluster> boundary_clusters;
  PathStats path_stats;
  CountsCheck counts_check;
  std::vector<TrackedPath> paths;
  std::vector<std::string> warnings;
  WeightOrder omega;
  Complex gamma;
  int start_attempts = 1;
  PhaseTimings timings;
};

namespace detail {

/// Gauss-Newton on the stratum of `support`: the linear rows and every
/// circuit polynomial, with coordinates outside the support fixed at zero,
/// plus the patch. Returns the final residual of that overdetermined system.
inline double refine_on_support(const HomotopySystem& H, CVector& y, Subset support, int iterations = 8) {
  const auto cols = to_indices(support);
  const auto k = static_cast<Eigen::Index>(cols.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!contains(support, static_cast<int>(i))) y(i) = 0.0;
  std::vector<std::size_t> inside;
  for (std::size_t c = 0; c < H.deformed_polys().size(); ++c)
    if (is_subset(H.deformed_polys()[c].circuit.support, support)) inside.push_back(c);
  const Eigen::Index rows = H.d() + static_cast<Eigen::Index>(inside.size()) + 1;
  auto system = [&](const CVector& at, CVector& F, CMatrix& J) {
    F.resize(rows);
    J.resize(rows, k);
    CVector f;
    CMatrix fy;
    CVector ft;
    H.eval_polys(at, Complex(1.0), f, fy, ft);
    const CVector lin = H.A_target() * at;
    for (Eigen::Index r = 0; r < H.d(); ++r) {
      F(r) = lin(r);
      for (Eigen::Index c = 0; c < k; ++c) J(r, c) = H.A_target()(r, cols[static_cast<std::size_t>(c)]);
    }
    for (std::size_t q = 0; q < inside.size(); ++q) {
      const auto r = H.d() + static_cast<Eigen::Index>(q);
      F(r) = f(static_cast<Eigen::Index>(inside[q]));
      for (Eigen::Index c = 0; c < k; ++c) J(r, c) = fy(static_cast<Eigen::Index>(inside[q]), cols[static_cast<std::size_t>(c)]);
    }
    F(rows - 1) = H.patch().dot(at) - 1.0;
    for (Eigen::Index c = 0; c < k; ++c) J(rows - 1, c) = std::conj(H.patch()(cols[static_cast<std::size_t>(c)]));
  };
  CVector F;
  CMatrix J;
  for (int it = 0; it < iterations; ++it) {
    system(y, F, J);
    const CVector dz = J.colPivHouseholderQr().solve(-F);
    if (!dz.allFinite()) break;
    for (Eigen::Index c = 0; c < k; ++c) y(cols[static_cast<std::size_t>(c)]) += dz(c);
    if (max_norm(dz) <= 1e-15 * std::max(1.0, max_norm(y))) break;
  }
  system(y, F, J);
  return max_norm(F) / std::max(1.0, max_norm(y));
}

}  // namespace detail

/// Builds the homotopy for (arr, u) from the configured or seeded random
/// data. Draw order from the seed: omega (if absent), A0 (if absent), R, v,
/// gamma (if absent).
struct PreparedHomotopy {
  HomotopySystem system;
  InitialIdeal ideal;
  WeightOrder omega;
  std::vector<CVector> starts;
  int attempts = 1;
};

inline PreparedHomotopy prepare_homotopy(const ArrangementMatrix& arr, const CVector& u, const SolveConfig& cfg,
                                         const std::vector<Circuit>& circs) {
  if (u.size() != arr.ground_size()) throw Error(ErrorKind::MalformedInput, "u has wrong length");
  if (!u.allFinite()) throw Error(ErrorKind::MalformedInput, "u has non-finite entries");
  const int size = arr.ground_size();
  const int d = arr.d();
  std::mt19937_64 rng(cfg.seed);
  WeightOrder omega = cfg.omega ? *cfg.omega : WeightOrder::random(size, rng);
  if (omega.size() != size) throw Error(ErrorKind::MalformedInput, "omega has wrong length");
  InitialIdeal J = initial_ideal(arr, omega, circs);
  const auto polys = deform_all(circuit_polynomials(circs), omega);
  if (cfg.A0 && (cfg.A0->rows() != d || cfg.A0->cols() != size))
    throw Error(ErrorKind::MalformedInput, "A0 must be d x (n+1)");
  CMatrix A0 = cfg.A0 ? *cfg.A0 : detail::random_complex_matrix(d, size, rng);
  CMatrix R = detail::random_complex_matrix(size - 1 - d, static_cast<Eigen::Index>(circs.size()), rng);
  CVector v(size);
  for (int i = 0; i < size; ++i) v(i) = detail::complex_gaussian(rng);
  const Complex gamma = cfg.gamma ? *cfg.gamma : detail::random_gamma(rng);
  int attempts = 1;
  std::vector<CVector> starts;
  for (;; ++attempts) {
    try {
      starts = start_solutions(A0, J, v);
      break;
    } catch (const Error& e) {
      if (cfg.A0 || attempts >= 3) throw;
      A0 = detail::random_complex_matrix(d, size, rng);
    }
  }
  HomotopySystem H(A0, target_linear_part(arr, u), polys, std::move(R), std::move(v), gamma);
  return {std::move(H), std::move(J), std::move(omega), std::move(starts), attempts};
}

/// Algorithm 1: tracks every start point, then classifies, certifies and
/// clusters the endpoints.
inline SolutionReport track_all(const ArrangementMatrix& arr, const CVector& u, const SolveConfig& cfg = {}) {
  using clock = std::chrono::steady_clock;
  const auto seconds = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  const auto t0 = clock::now();
  const auto circs = circuits(arr);
  const auto all_flats = flats(arr);
  const auto t1 = clock::now();
  auto prep = prepare_homotopy(arr, u, cfg, circs);
  const auto t2 = clock::now();
  const auto& H = prep.system;
  const auto& tc = cfg.tracker;

  SolutionReport report;
  report.omega = prep.omega;
  report.gamma = H.gamma();
  report.start_attempts = prep.attempts;
  const auto count = prep.starts.size();
  report.paths.resize(count);
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(count)));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) report.paths[k] = track_with_retry(H, prep.starts[k], tc);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = static_cast<std::size_t>(w); k < count; k += static_cast<std::size_t>(threads))
          report.paths[k] = track_with_retry(H, prep.starts[k], tc);
      });
    }
    for (auto& t : pool) t.join();
  }

  // Re-track suspected jumps with shorter steps.
  std::vector<std::size_t> suspects = detail::jump_suspects(H, report.paths, tc);
  for (double factor : {10.0, 100.0}) {
    if (suspects.empty()) break;
    for (std::size_t k : suspects) report.paths[k] = track_cautiously(H, prep.starts[k], tc, factor);
    suspects = detail::jump_suspects(H, report.paths, tc);
  }
  if (!suspects.empty())
    report.warnings.push_back("PathJumping: " + std::to_string(suspects.size()) +
                              " paths end on a shared or spurious interior point");

  const auto t3 = clock::now();
  auto& stats = report.path_stats;
  stats.total = static_cast<int>(count);
  const Subset ground = full_set(arr.ground_size());
  for (std::size_t k = 0; k < count; ++k) {
    const auto& path = report.paths[k];
    ++stats.by_status[std::string(to_string(path.status))];
    if (path.retried) ++stats.retried;
    if (is_failure(path.status)) continue;
    CVector y = path.endpoint;
    // A stalled endpoint sits at t = 1 - gap, so its vanishing coordinates
    // are only small, not tiny.
    const double support_tol = path.status == PathStatus::Singular ? std::sqrt(tc.endgame_gap) : tc.zero_tol;
    const Subset support = detail::numerical_support(y, support_tol);
    const double residual = detail::refine_on_support(H, y, support);
    if (!(residual <= tc.verify_tol) || !(H.target_residual(y) <= tc.verify_tol)) {
      ++stats.unverified;
      continue;
    }
    if (support == ground) {
      bool merged = false;
      for (auto& sol : report.interior) {
        if (detail::max_norm(sol.y - y) <= tc.cluster_tol * std::max(1.0, detail::max_norm(y))) {
          sol.paths.push_back(static_cast<int>(k));
          merged = true;
          break;
        }
      }
      if (merged) continue;
      InteriorSolution sol;
      sol.y = y;
      sol.paths.push_back(static_cast<int>(k));
      try {
        auto inv = phi_inverse(arr, y, tc.verify_tol, tc.zero_tol);
        sol.point.x = inv.x;
        sol.point.residual = scattering_residual(arr, u, inv.x, tc.zero_tol);
        const auto hc = hessian_nondegenerate(arr, u, inv.x, 1e-10, tc.zero_tol);
        sol.point.hessian_ok = hc.nondegenerate;
        sol.hessian_condition = hc.condition;
      } catch (const Error& e) {
        ++stats.unverified;
        continue;
      }
      report.interior.push_back(std::move(sol));
    } else {
      bool merged = false;
      for (auto& cl : report.boundary_clusters) {
        if (cl.support == support &&
            detail::max_norm(cl.representative - y) <= tc.cluster_tol * std::max(1.0, detail::max_norm(y))) {
          cl.paths.push_back(static_cast<int>(k));
          ++cl.multiplicity;
          merged = true;
          break;
        }
      }
      if (merged) continue;
      BoundaryCluster cl;
      cl.support = support;
      cl.representative = y;
      cl.multiplicity = 1;
      cl.paths.push_back(static_cast<int>(k));
      const Flat* f = find_flat(all_flats, support);
      cl.type_ii = f != nullptr && f->type == FlatType::TypeII;
      cl.residual = residual;
      if (!cl.type_ii) report.warnings.push_back("boundary support " + format_subset(support) + " is not a type_ii flat");
      report.boundary_clusters.push_back(std::move(cl));
    }
  }
  std::stable_sort(report.boundary_clusters.begin(), report.boundary_clusters.end(),
                   [](const BoundaryCluster& a, const BoundaryCluster& b) {
                     if (a.support != b.support) return subset_less(a.support, b.support);
                     return a.paths.front() < b.paths.front();
                   });

  auto& cc = report.counts_check;
  cc.interior = static_cast<int>(report.interior.size());
  try {
    cc.ml_degree = ml_degree(arr, all_flats);
  } catch (const Error&) {
    cc.ml_degree = -1;
  }
  cc.paths = stats.total;
  cc.reciprocal_degree = static_cast<int>(prep.ideal.bases.size());
  for (const auto& cl : report.boundary_clusters) cc.boundary_paths += cl.multiplicity;
  cc.interior_matches = cc.interior == cc.ml_degree;
  cc.paths_match = cc.paths == cc.reciprocal_degree;
  if (stats.failed() * 10 > stats.total)
    report.warnings.push_back("TooManyFailures: " + std::to_string(stats.failed()) + " of " +
                              std::to_string(stats.total) + " paths failed");
  if (stats.unverified > 0)
    report.warnings.push_back(std::to_string(stats.unverified) + " endpoints failed verification at t = 1");
  if (!cfg.return_boundary) report.boundary_clusters.clear();
  const auto t4 = clock::now();
  report.timings = {seconds(t0, t1), seconds(t1, t2), seconds(t2, t3), seconds(t3, t4)};
  return report;
}

/// Result of verify_solution_set.
struct Certificate {
  int expected = 0;
  int observed = 0;
  bool reality_checked = false;
  bool chambers_checked = false;
  int bounded_chambers = 0;
  std::vector<std::vector<int>> chamber_signs;  // sign vector of each interior solution
};

namespace detail {

/// Sign vectors of all bounded chambers of a real arrangement with d <= 2.
/// Every bounded chamber has a vertex, so sampling just off each vertex along
/// directions between consecutive lines through it reaches all of them.
/// Boundedness is exact: the recession cone {v : s_i a_i.v >= 0} is nonzero
/// iff it contains one of the candidate rays.
inline std::vector<std::vector<int>> bounded_chamber_signs(const ArrangementMatrix& arr) {
  const int d = arr.d();
  const int size = arr.ground_size();
  const RationalMatrix& L = arr.L();
  const Eigen::MatrixXd Ln = arr.L_numeric();
  auto form = [&](int i, const Eigen::VectorXd& x) {
    double v = Ln(0, i);
    for (int j = 0; j < d; ++j) v += Ln(j + 1, i) * x(j);
    return v;
  };
  std::vector<std::vector<Rational>> rays;
  if (d == 1) {
    rays = {{Rational(1)}, {Rational(-1)}};
  } else {
    for (int i = 0; i < size; ++i) {
      const Rational a1 = L(1, static_cast<std::size_t>(i));
      const Rational a2 = L(2, static_cast<std::size_t>(i));
      if (a1 == 0 && a2 == 0) continue;
      rays.push_back({-a2, a1});
      rays.push_back({a2, -a1});
    }
  }
  auto bounded = [&](const std::vector<int>& s) {
    for (const auto& v : rays) {
      bool inside = true;
      for (int i = 0; i < size && inside; ++i) {
        Rational dot = 0;
        for (int j = 0; j < d; ++j) dot += L(static_cast<std::size_t>(j + 1), static_cast<std::size_t>(i)) * v[static_cast<std::size_t>(j)];
        if (s[static_cast<std::size_t>(i)] * sgn(dot) < 0) inside = false;
      }
      if (inside) return false;
    }
    return true;
  };
  std::vector<Eigen::VectorXd> samples;
  if (d == 1) {
    std::vector<double> roots;
    for (int i = 0; i < size; ++i)
      if (Ln(1, i) != 0.0) roots.push_back(-Ln(0, i) / Ln(1, i));
    std::sort(roots.begin(), roots.end());
    for (std::size_t k = 0; k + 1 < roots.size(); ++k) {
      if (roots[k + 1] - roots[k] <= 1e-12 * std::max(1.0, std::abs(roots[k]))) continue;
      samples.push_back(Eigen::VectorXd::Constant(1, 0.5 * (roots[k] + roots[k + 1])));
    }
  } else {
    std::vector<Eigen::Vector2d> vertices;
    for (int i = 0; i < size; ++i) {
      for (int j = i + 1; j < size; ++j) {
        Eigen::Matrix2d M;
        M << Ln(1, i), Ln(2, i), Ln(1, j), Ln(2, j);
        if (std::abs(M.determinant()) < 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff())) continue;
        vertices.push_back(M.partialPivLu().solve(Eigen::Vector2d(-Ln(0, i), -Ln(0, j))));
      }
    }
    for (const auto& p : vertices) {
      std::vector<double> angles;
      double eps = std::numeric_limits<double>::infinity();
      for (int i = 0; i < size; ++i) {
        const double norm = std::hypot(Ln(1, i), Ln(2, i));
        if (norm == 0.0) continue;
        const double dist = std::abs(form(i, p)) / norm;
        if (dist <= 1e-9 * std::max(1.0, p.norm())) {
          const double a = std::atan2(Ln(1, i), -Ln(2, i));  // direction of the line
          angles.push_back(std::fmod(a + 2 * M_PI, M_PI));
          angles.push_back(std::fmod(a + 2 * M_PI, M_PI) + M_PI);
        } else {
          eps = std::min(eps, dist);
        }
      }
      if (!std::isfinite(eps)) eps = 1.0;
      std::sort(angles.begin(), angles.end());
      for (std::size_t k = 0; k < angles.size(); ++k) {
        const double next = k + 1 < angles.size() ? angles[k + 1] : angles[0] + 2 * M_PI;
        if (next - angles[k] < 1e-12) continue;
        const double mid = 0.5 * (angles[k] + next);
        samples.push_back(p + 0.25 * eps * Eigen::Vector2d(std::cos(mid), std::sin(mid)));
      }
    }
  }
  std::vector<std::vector<int>> out;
  for (const auto& x : samples) {
    std::vector<int> s(static_cast<std::size_t>(size));
    bool on_line = false;
    for (int i = 0; i < size; ++i) {
      const double v = form(i, x);
      if (v == 0.0) on_line = true;
      s[static_cast<std::size_t>(i)] = v > 0 ? 1 : -1;
    }
    if (on_line || !bounded(s)) continue;
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Certifies a report: the interior count equals the ML degree; for positive
/// real u the solutions are real and, when d <= 2, there is exactly one in
/// each bounded chamber.
inline Certificate verify_solution_set(const ArrangementMatrix& arr, const CVector& u, const SolutionReport& report,
                                       double imag_tol = 1e-8) {
  Certificate cert;
  cert.expected = ml_degree(arr);
  cert.observed = static_cast<int>(report.interior.size());
  if (cert.observed != cert.expected) {
    throw Error(ErrorKind::CountMismatch, "found " + std::to_string(cert.observed) + " interior solutions, expected " +
                                              std::to_string(cert.expected));
  }
  bool positive = true;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (!(u(i).imag() == 0.0 && u(i).real() > 0.0)) positive = false;
  if (!positive) return cert;
  cert.reality_checked = true;
  for (std::size_t k = 0; k < report.interior.size(); ++k) {
    const auto& x = report.interior[k].point.x;
    const double im = x.size() == 0 ? 0.0 : x.imag().cwiseAbs().maxCoeff();
    if (!(im < imag_tol))
      throw Error(ErrorKind::RealityViolation,
                  "solution " + std::to_string(k) + " has imaginary part " + std::to_string(im));
  }
  if (arr.d() > 2) return cert;
  cert.chambers_checked = true;
  const auto bounded = detail::bounded_chamber_signs(arr);
  cert.bounded_chambers = static_cast<int>(bounded.size());
  for (std::size_t k = 0; k < report.interior.size(); ++k) {
    const CVector forms = linear_forms_at(arr, report.interior[k].point.x);
    std::vector<int> s(static_cast<std::size_t>(forms.size()));
    for (Eigen::Index i = 0; i < forms.size(); ++i) s[static_cast<std::size_t>(i)] = forms(i).real() > 0 ? 1 : -1;
    if (!std::binary_search(bounded.begin(), bounded.end(), s))
      throw Error(ErrorKind::ChamberViolation, "solution " + std::to_string(k) + " lies in no bounded chamber");
    if (std::find(cert.chamber_signs.begin(), cert.chamber_signs.end(), s) != cert.chamber_signs.end())
      throw Error(ErrorKind::ChamberViolation, "solution " + std::to_string(k) + " shares its chamber with another");
    cert.chamber_signs.push_back(std::move(s));
  }
  if (cert.bounded_chambers != cert.observed) {
    throw Error(ErrorKind::ChamberViolation, std::to_string(cert.bounded_chambers) + " bounded chambers but " +
                                                 std::to_string(cert.observed) + " solutions");
  }
  return cert;
}

}  // namespace scatter

#endif  // SCATTER_HOMOTOPY_HPP
