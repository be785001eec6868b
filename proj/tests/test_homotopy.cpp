#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"

using namespace scatter;

namespace {

Subset set_of(std::initializer_list<int> v) {
  Subset s = 0;
  for (int i : v) s |= singleton(i);
  return s;
}

CVector ones(int n) { return CVector::Constant(n, Complex(1.0)); }

/// Interior points must be pairwise distinct, certified and nondegenerate.
void expect_certified(const ArrangementMatrix& arr, const CVector& u, const SolutionReport& r) {
  for (const auto& s : r.interior) {
    EXPECT_LT(scattering_residual(arr, u, s.point.x), 1e-8);
    EXPECT_TRUE(hessian_nondegenerate(arr, u, s.point.x).nondegenerate);
  }
  for (std::size_t a = 0; a < r.interior.size(); ++a)
    for (std::size_t b = a + 1; b < r.interior.size(); ++b)
      EXPECT_GT((r.interior[a].y - r.interior[b].y).cwiseAbs().maxCoeff(), 1e-4);
}

}  // namespace

TEST(StartSolutions, ExampleOneWithTargetAsStart) {
  const auto arr = oracle::example_one();
  std::mt19937_64 rng(1);
  const CVector u = oracle::random_u(4, rng);
  const CMatrix A0 = target_linear_part(arr, u);
  const auto J = initial_ideal(arr, WeightOrder::make({1, 2, 3, 4}));
  const CVector v = oracle::random_u(4, rng);
  const auto starts = start_solutions(A0, J, v);
  ASSERT_EQ(starts.size(), 3u);
  for (const auto& y : starts) {
    EXPECT_LT((A0 * y).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(std::abs(v.dot(y) - 1.0), 0.0, 1e-12);
  }
  // The component y1 = 0 (complement of the basis {0,2,3}).
  bool found = false;
  for (const auto& y : starts)
    if (std::abs(y(1)) == 0.0) {
      found = true;
      EXPECT_LT(std::abs(u(0) * y(0) - u(2) * y(2) - 2.0 * u(3) * y(3)), 1e-12);
      EXPECT_LT(std::abs(-2.0 * u(2) * y(2) - u(3) * y(3)), 1e-12);
    }
  EXPECT_TRUE(found);
}

TEST(StartSolutions, OnePerPrimeOnExampleTwo) {
  const auto arr = oracle::example_two();
  std::mt19937_64 rng(3);
  const auto J = initial_ideal(arr, WeightOrder::identity(4));
  const auto starts = start_solutions(detail::random_complex_matrix(2, 4, rng), J, oracle::random_u(4, rng));
  ASSERT_EQ(starts.size(), static_cast<std::size_t>(reciprocal_degree(arr)));
  for (const auto& y : starts) {
    int zeros = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) zeros += y(i) == Complex(0.0);
    EXPECT_EQ(zeros, 1);  // n + 1 - (d + 1) = 1 coordinate off the basis
  }
}

TEST(StartSolutions, DegenerateStartMatrixIsReported) {
  const auto arr = oracle::example_one();
  CMatrix A0 = CMatrix::Zero(2, 4);
  A0(0, 0) = 1.0;
  A0(1, 0) = 2.0;  // rank one on every basis containing 0
  const auto J = initial_ideal(arr, WeightOrder::identity(4));
  try {
    start_solutions(A0, J, ones(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StartDegenerate);
  }
}

TEST(TrackOne, ConstantHomotopyStaysPut) {
  // A0 equal to the target, undeformed polynomials and gamma = 0: H does not
  // depend on t, so a target solution is a fixed point of the tracker.
  const auto arr = oracle::example_one();
  std::mt19937_64 rng(6);
  const CMatrix A = target_linear_part(arr, ones(4));
  const CMatrix R = detail::random_complex_matrix(1, 1, rng);
  const CVector v = oracle::random_u(4, rng);
  HomotopySystem H(A, A, circuit_polynomials(arr), R, v, 0.0);
  CVector x(2);
  x << 1.0 / 3, 1.0 / 3;
  CVector y = phi(arr, x);
  y /= v.dot(y);
  TrackerConfig cfg;
  cfg.initial_step = 1.0;
  cfg.max_step = 1.0;
  const auto path = track_one(H, y, cfg);
  EXPECT_EQ(path.status, PathStatus::Success);
  EXPECT_LT((path.endpoint - y).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(path.steps_taken, 2);
}

TEST(TrackOne, ExampleOnePathFromFirstComponent) {
  const auto arr = oracle::example_one();
  std::mt19937_64 rng(10);
  const CVector u = oracle::random_u(4, rng);
  SolveConfig cfg;
  cfg.omega = WeightOrder::make({1, 2, 3, 4});
  const auto prep = prepare_homotopy(arr, u, cfg, circuits(arr));
  for (const auto& start : prep.starts) {
    if (start(1) != Complex(0.0)) continue;
    const auto path = track_one(prep.system, start, cfg.tracker);
    ASSERT_EQ(path.status, PathStatus::Success);
    EXPECT_LT(path.newton_residual, 1e-12);
    const auto x = phi_inverse(arr, path.endpoint).x;
    EXPECT_LT(scattering_residual(arr, u, x), 1e-8);
  }
}

TEST(TrackOne, TinyStepBudgetStopsEarly) {
  const auto arr = oracle::example_one();
  std::mt19937_64 rng(12);
  SolveConfig cfg;
  const auto prep = prepare_homotopy(arr, oracle::random_u(4, rng), cfg, circuits(arr));
  TrackerConfig tiny;
  tiny.max_steps = 2;
  const auto path = track_one(prep.system, prep.starts.front(), tiny);
  EXPECT_EQ(path.status, PathStatus::MaxSteps);
  EXPECT_LT(path.t_reached, 1.0);
}

TEST(TrackOne, JumpSuspects) {
  const auto arr = oracle::example_one();
  std::mt19937_64 rng(13);
  SolveConfig cfg;
  const auto prep = prepare_homotopy(arr, oracle::random_u(4, rng), cfg, circuits(arr));
  std::vector<TrackedPath> paths;
  for (const auto& start : prep.starts) paths.push_back(track_one(prep.system, start, cfg.tracker));
  EXPECT_TRUE(detail::jump_suspects(prep.system, paths, cfg.tracker).empty());

  auto shared = paths;
  shared[1].endpoint = shared[0].endpoint;
  EXPECT_EQ(detail::jump_suspects(prep.system, shared, cfg.tracker), (std::vector<std::size_t>{0, 1}));

  auto spurious = paths;
  spurious[2].endpoint *= Complex(1.0, 1e-3);
  spurious[2].endpoint(0) += 1e-3;
  EXPECT_EQ(detail::jump_suspects(prep.system, spurious, cfg.tracker), (std::vector<std::size_t>{2}));

  const auto redone = track_cautiously(prep.system, prep.starts[2], cfg.tracker, 10);
  EXPECT_EQ(redone.status, PathStatus::Success);
  EXPECT_TRUE(redone.retried);
  EXPECT_LT(detail::max_norm(redone.endpoint - paths[2].endpoint), 1e-8);
}

TEST(TrackAll, ExampleOneRandomU) {
  const auto arr = oracle::example_one();
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const CVector u = oracle::random_u(4, rng);
    SolveConfig cfg;
    cfg.seed = 100 + trial;
    const auto r = track_all(arr, u, cfg);
    EXPECT_EQ(r.path_stats.total, 3);
    EXPECT_EQ(r.interior.size(), 3u);
    EXPECT_TRUE(r.boundary_clusters.empty());
    EXPECT_TRUE(r.counts_check.interior_matches);
    EXPECT_TRUE(r.counts_check.paths_match);
    expect_certified(arr, u, r);
    EXPECT_EQ(verify_solution_set(arr, u, r).observed, 3);
  }
}

TEST(TrackAll, ExampleTwoHasOneBoundaryPoint) {
  const auto arr = oracle::example_two();
  std::mt19937_64 rng(19);
  const CVector u = oracle::random_u(4, rng);
  const auto r = track_all(arr, u);
  EXPECT_EQ(r.path_stats.total, 2);
  ASSERT_EQ(r.interior.size(), 1u);
  ASSERT_EQ(r.boundary_clusters.size(), 1u);
  EXPECT_EQ(r.boundary_clusters[0].support, set_of({0, 1}));
  EXPECT_TRUE(r.boundary_clusters[0].type_ii);
  EXPECT_EQ(r.boundary_clusters[0].multiplicity, 1);
  expect_certified(arr, u, r);
}

TEST(TrackAll, GenericFourBySeven) {
  std::mt19937_64 rng(23);
  RationalMatrix L(4, 7);
  std::uniform_int_distribution<int> num(-100, 100);
  std::uniform_int_distribution<int> den(1, 100);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 7; ++j) L(i, j) = make_rational(num(rng), den(rng));
  const auto arr = ArrangementMatrix::from_matrix(L);
  const CVector u = oracle::random_u(7, rng);
  const auto r = track_all(arr, u);
  EXPECT_EQ(r.path_stats.total, 20);
  EXPECT_EQ(r.interior.size(), 20u);
  EXPECT_TRUE(r.boundary_clusters.empty());
  EXPECT_EQ(r.path_stats.failed(), 0);
  expect_certified(arr, u, r);
}

TEST(TrackAll, OptimalOnCriterionEqualInstances) {
  std::mt19937_64 rng(29);
  int tested = 0;
  while (tested < 20) {
    const int d = 2 + tested % 2;
    const int n = 4 + tested % 4;
    if (n <= d) continue;
    const auto arr = oracle::random_arrangement(d, n, -20, 20, rng);
    if (!degree_criterion(arr).equal) continue;
    const CVector u = oracle::random_u(arr.ground_size(), rng);
    SolveConfig cfg;
    cfg.seed = 1000 + tested;
    const auto r = track_all(arr, u, cfg);
    EXPECT_EQ(r.path_stats.total, reciprocal_degree(arr));
    EXPECT_EQ(r.path_stats.by_status.count("success") ? r.path_stats.by_status.at("success") : 0, r.path_stats.total);
    EXPECT_EQ(static_cast<int>(r.interior.size()), r.path_stats.total);
    expect_certified(arr, u, r);
    ++tested;
  }
}

TEST(TrackAll, BoundarySupportsAreTypeTwoFlats) {
  std::mt19937_64 rng(31);
  int with_boundary = 0;
  for (int trial = 0; trial < 15; ++trial) {
    const auto arr = oracle::random_arrangement(2, 4 + trial % 3, -2, 2, rng);
    const auto fl = flats(arr);
    const CVector u = oracle::random_u(arr.ground_size(), rng);
    const auto r = track_all(arr, u);
    EXPECT_EQ(static_cast<int>(r.interior.size()), ml_degree(arr, fl));
    int mass = static_cast<int>(r.interior.size());
    for (const auto& c : r.boundary_clusters) {
      const Flat* f = find_flat(fl, c.support);
      ASSERT_NE(f, nullptr) << format_subset(c.support);
      EXPECT_EQ(f->type, FlatType::TypeII);
      mass += c.multiplicity;
    }
    EXPECT_EQ(mass, reciprocal_degree(arr));
    with_boundary += !r.boundary_clusters.empty();
  }
  EXPECT_GT(with_boundary, 0);
}

TEST(TrackAll, SameSeedSameReport) {
  const auto arr = oracle::example_two();
  std::mt19937_64 rng(37);
  const CVector u = oracle::random_u(4, rng);
  SolveConfig cfg;
  cfg.seed = 5;
  const auto a = track_all(arr, u, cfg);
  const auto b = track_all(arr, u, cfg);
  ASSERT_EQ(a.interior.size(), b.interior.size());
  EXPECT_EQ(a.interior[0].point.x, b.interior[0].point.x);
  EXPECT_EQ(a.gamma, b.gamma);
  EXPECT_EQ(a.omega.omega, b.omega.omega);
}

TEST(TrackAll, ThreadedMatchesSerial) {
  const auto inst = build_chy(6, std::nullopt, std::uint64_t{4});
  SolveConfig cfg;
  const auto serial = track_all(inst.arrangement, inst.s, cfg);
  cfg.threads = 3;
  const auto threaded = track_all(inst.arrangement, inst.s, cfg);
  ASSERT_EQ(serial.paths.size(), threaded.paths.size());
  for (std::size_t k = 0; k < serial.paths.size(); ++k) EXPECT_EQ(serial.paths[k].endpoint, threaded.paths[k].endpoint);
}

TEST(Verify, ExampleOneRealChambers) {
  const auto arr = oracle::example_one();
  const auto r = track_all(arr, ones(4));
  const auto cert = verify_solution_set(arr, ones(4), r);
  EXPECT_TRUE(cert.reality_checked);
  EXPECT_TRUE(cert.chambers_checked);
  EXPECT_EQ(cert.bounded_chambers, 3);
  EXPECT_EQ(cert.chamber_signs.size(), 3u);
}

TEST(Verify, ExampleTwoSingleBox) {
  const auto arr = oracle::example_two();
  CVector u(4);
  u << 1.0, 2.0, 0.5, 3.0;
  const auto r = track_all(arr, u);
  const auto cert = verify_solution_set(arr, u, r);
  EXPECT_EQ(cert.observed, 1);
  EXPECT_EQ(cert.bounded_chambers, 1);
}

TEST(Verify, ComplexUSkipsReality) {
  const auto arr = oracle::example_one();
  std::mt19937_64 rng(41);
  const CVector u = oracle::random_u(4, rng);
  const auto cert = verify_solution_set(arr, u, track_all(arr, u));
  EXPECT_EQ(cert.observed, 3);
  EXPECT_FALSE(cert.reality_checked);
}

TEST(Verify, MissingSolutionIsACountMismatch) {
  const auto arr = oracle::example_one();
  auto r = track_all(arr, ones(4));
  r.interior.pop_back();
  try {
    verify_solution_set(arr, ones(4), r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CountMismatch);
  }
}

TEST(Verify, ComplexSolutionFailsReality) {
  const auto arr = oracle::example_one();
  auto r = track_all(arr, ones(4));
  r.interior[0].point.x(0) += Complex(0.0, 1e-3);
  try {
    verify_solution_set(arr, ones(4), r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RealityViolation);
  }
}

TEST(Verify, DuplicatedChamberIsAViolation) {
  const auto arr = oracle::example_one();
  auto r = track_all(arr, ones(4));
  r.interior[1] = r.interior[0];
  try {
    verify_solution_set(arr, ones(4), r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ChamberViolation);
  }
}
