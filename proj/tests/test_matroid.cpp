#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"

using namespace scatter;

namespace {

RationalVector rv(std::initializer_list<long> v) {
  RationalVector out;
  for (long x : v) out.emplace_back(x);
  return out;
}

Subset set_of(std::initializer_list<int> v) {
  Subset s = 0;
  for (int i : v) s |= singleton(i);
  return s;
}

/// Two connected components: {0,1,2} with forms 1, x1, 1 + x1 and {3,4,5}
/// with forms x2, 2 x2, -x2.
ArrangementMatrix direct_sum() {
  return ArrangementMatrix::from_matrix(oracle::matrix_of({{1, 0, 1, 0, 0, 0}, {0, 1, 1, 0, 0, 0}, {0, 0, 0, 1, 2, -1}}));
}

long long crapo_beta(const ArrangementMatrix& arr, const oracle::Ranks& r) {
  const int size = arr.ground_size();
  long long sum = 0;
  for (Subset s = 0; s < (Subset{1} << size); ++s) sum += (cardinality(s) % 2 == 0 ? 1 : -1) * r.L[s];
  return (r.L[full_set(size)] % 2 == 0 ? 1 : -1) * sum;
}

}  // namespace

TEST(Matroid, ExampleOneCircuit) {
  const auto circs = circuits(oracle::example_one());
  ASSERT_EQ(circs.size(), 1u);
  EXPECT_EQ(circs[0].support, full_set(4));
  EXPECT_EQ(circs[0].alpha, rv({1, -1, -1, 1}));
}

TEST(Matroid, ExampleTwoCircuit) {
  const auto circs = circuits(oracle::example_two());
  ASSERT_EQ(circs.size(), 1u);
  EXPECT_EQ(circs[0].support, set_of({1, 2, 3}));
  EXPECT_EQ(circs[0].alpha, rv({1, 1, -1}));
}

TEST(Matroid, IndependentColumnsHaveNoCircuits) {
  const auto arr = ArrangementMatrix::from_matrix(RationalMatrix::identity(2));
  EXPECT_TRUE(circuits(arr).empty());
  const auto bases = nbc_bases(arr, WeightOrder::identity(2));
  ASSERT_EQ(bases.size(), 1u);
  EXPECT_EQ(bases[0], full_set(2));
  EXPECT_TRUE(broken_circuits({}, WeightOrder::identity(2)).empty());
}

TEST(Matroid, ExampleTwoFlats) {
  const auto fl = flats(oracle::example_two());
  std::vector<Subset> supports;
  for (const auto& f : fl) supports.push_back(f.support);
  std::sort(supports.begin(), supports.end());
  std::vector<Subset> expected{0,
                               set_of({0}),
                               set_of({1}),
                               set_of({2}),
                               set_of({3}),
                               set_of({0, 1}),
                               set_of({0, 2}),
                               set_of({0, 3}),
                               set_of({1, 2, 3}),
                               full_set(4)};
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(supports, expected);
  const Flat* f01 = find_flat(fl, set_of({0, 1}));
  ASSERT_NE(f01, nullptr);
  EXPECT_EQ(f01->type, FlatType::TypeII);
}

TEST(Matroid, ExampleOneProperFlatsAreSingletonsOfTypeOne) {
  for (const auto& f : flats(oracle::example_one())) {
    if (f.support == 0 || f.support == full_set(4)) continue;
    EXPECT_EQ(cardinality(f.support), f.rank_L);
    EXPECT_EQ(f.type, FlatType::TypeI);
  }
}

TEST(Matroid, BrokenCircuitsAndBases) {
  const auto w = WeightOrder::make({1, 2, 3, 4});
  EXPECT_EQ(broken_circuits(circuits(oracle::example_one()), w), std::vector<Subset>{set_of({1, 2, 3})});
  EXPECT_EQ(broken_circuits(circuits(oracle::example_two()), w), std::vector<Subset>{set_of({2, 3})});
  const auto bases = nbc_bases(oracle::example_one(), w);
  std::vector<Subset> expected{set_of({0, 1, 2}), set_of({0, 1, 3}), set_of({0, 2, 3})};
  auto sorted = bases;
  std::sort(sorted.begin(), sorted.end());
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(sorted, expected);
}

TEST(Matroid, WeightOrderRejectsRepeatedWeights) {
  EXPECT_THROW(WeightOrder::make({1, 2, 2}), Error);
}

TEST(Matroid, Degrees) {
  EXPECT_EQ(reciprocal_degree(oracle::example_one()), 3);
  EXPECT_EQ(reciprocal_degree(oracle::example_two()), 2);
  EXPECT_EQ(ml_degree(oracle::example_one()), 3);
  EXPECT_EQ(ml_degree(oracle::example_two()), 1);
  std::mt19937_64 rng(42);
  RationalMatrix L(4, 7);
  std::uniform_int_distribution<int> num(-100, 100);
  std::uniform_int_distribution<int> den(1, 100);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 7; ++j) L(i, j) = make_rational(num(rng), den(rng));
  EXPECT_EQ(reciprocal_degree(ArrangementMatrix::from_matrix(L)), 20);
}

TEST(Matroid, FullRankImpliesEssential) {
  // rank(L) <= 1 + rank(A), so every accepted L has rank(A) = d.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto arr = oracle::random_arrangement(1 + trial % 3, 4 + trial % 3, -1, 1, rng);
    EXPECT_TRUE(is_essential(arr));
  }
}

TEST(Matroid, BetaAndConnectivity) {
  const auto one = oracle::example_one();
  EXPECT_EQ(beta_invariant(one), crapo_beta(one, oracle::all_ranks(one)));
  EXPECT_NE(beta_invariant(one), 0);
  EXPECT_TRUE(is_connected(one));

  const auto sum = direct_sum();
  EXPECT_EQ(beta_invariant(sum), 0);
  EXPECT_FALSE(is_connected(sum));

  // Element 0 of the second example lies in no circuit.
  const auto two = oracle::example_two();
  const long long beta = crapo_beta(two, oracle::all_ranks(two));
  EXPECT_EQ(beta_invariant(two), beta);
  EXPECT_EQ(beta, 0);
  EXPECT_FALSE(is_connected(two));
}

TEST(Matroid, DegreeCriterion) {
  EXPECT_TRUE(degree_criterion(oracle::example_one()).equal);
  const auto crit = degree_criterion(oracle::example_two());
  EXPECT_FALSE(crit.equal);
  ASSERT_EQ(crit.witnesses.size(), 1u);
  EXPECT_EQ(crit.witnesses[0].support, set_of({0, 1}));
}

TEST(MatroidOracle, CircuitsAndFlatsMatchBruteForce) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const int n = d + (trial / 3) % (8 - d);  // n + 1 <= 8
    const int range = trial % 2 == 0 ? 1 : 3;
    const auto arr = oracle::random_arrangement(d, n, -range, range, rng);
    const auto r = oracle::all_ranks(arr);

    std::vector<Subset> got;
    for (const auto& c : circuits(arr)) {
      got.push_back(c.support);
      // The relation holds exactly.
      for (std::size_t row = 0; row < arr.L().rows(); ++row) {
        Rational s = 0;
        for (std::size_t k = 0; k < c.indices.size(); ++k)
          s += c.alpha[k] * arr.L()(row, static_cast<std::size_t>(c.indices[k]));
        EXPECT_EQ(s, Rational(0));
      }
      EXPECT_EQ(c.alpha.front(), Rational(1));
    }
    std::sort(got.begin(), got.end());
    ASSERT_EQ(got, oracle::circuits(arr, r)) << "trial " << trial;

    auto fl = flats(arr);
    std::sort(fl.begin(), fl.end(), [](const Flat& a, const Flat& b) { return a.support < b.support; });
    const auto expected = oracle::flats(arr, r);
    ASSERT_EQ(fl.size(), expected.size()) << "trial " << trial;
    for (std::size_t k = 0; k < fl.size(); ++k) {
      EXPECT_EQ(fl[k].support, expected[k].support);
      EXPECT_EQ(fl[k].rank_L, expected[k].rank_L);
      EXPECT_EQ(fl[k].rank_A, expected[k].rank_A);
      EXPECT_EQ(fl[k].type, expected[k].type);
    }
  }
}

TEST(MatroidOracle, DegreesMatchIndependentFormulas) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 1 + trial % 3;
    const int n = d + 1 + (trial / 3) % (7 - d);
    const auto arr = oracle::random_arrangement(d, n, -2, 2, rng);
    const auto r = oracle::all_ranks(arr);
    const int rec = reciprocal_degree(arr);
    const int ml = ml_degree(arr);
    EXPECT_EQ(rec, oracle::tutte_1_0(arr, r));
    EXPECT_EQ(ml, oracle::whitney_ml_degree(arr, r));
    EXPECT_LE(ml, rec);
    EXPECT_EQ(degree_criterion(arr).equal, ml == rec);
    EXPECT_EQ(beta_invariant(arr), crapo_beta(arr, r));
    for (Subset b : nbc_bases(arr, WeightOrder::identity(arr.ground_size()))) EXPECT_EQ(cardinality(b), d + 1);
    for (int k = 0; k < 5; ++k) {
      const auto omega = WeightOrder::random(arr.ground_size(), rng);
      EXPECT_EQ(static_cast<int>(nbc_bases(arr, omega).size()), rec);
      EXPECT_EQ(oracle::nbc_basis_count(arr, r, omega.omega), rec);
    }
  }
}
