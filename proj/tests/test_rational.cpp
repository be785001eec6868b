#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"

using namespace scatter;

TEST(Rational, ParsesIntegersAndFractions) {
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(parse_rational("-3/6"), Rational(-1, 2));
  EXPECT_EQ(parse_rational(" +4 / 8 "), Rational(1, 2));
  EXPECT_EQ(format_rational(parse_rational("10/4")), "5/2");
}

TEST(Rational, RejectsMalformedText) {
  for (const char* bad : {"", "1/0", "abc", "1.5", "1/-2", "2/3/4"}) {
    try {
      parse_rational(bad);
      FAIL() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::MalformedInput);
    }
  }
}

TEST(Rational, RankKernelDeterminant) {
  const auto M = oracle::matrix_of({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}});
  EXPECT_EQ(rank(M), 2u);
  EXPECT_EQ(determinant(M), Rational(0));
  const auto ker = kernel(M);
  ASSERT_EQ(ker.size(), 1u);
  for (std::size_t i = 0; i < 3; ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < 3; ++j) s += M(i, j) * ker[0][j];
    EXPECT_EQ(s, Rational(0));
  }
  EXPECT_EQ(determinant(oracle::matrix_of({{2, 1}, {1, 3}})), Rational(5));
  EXPECT_EQ(determinant(RationalMatrix::identity(4)), Rational(1));
}

TEST(Rational, DeterminantMatchesLeibnizOnRandom3x3) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> e(-9, 9);
  for (int trial = 0; trial < 50; ++trial) {
    RationalMatrix M(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) M(i, j) = make_rational(e(rng), 1 + trial % 4);
    const Rational leibniz = M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
                             M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
                             M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
    EXPECT_EQ(determinant(M), leibniz);
    EXPECT_EQ(rank(M) == 3, leibniz != 0);
  }
}

TEST(Rational, EchelonBasisTracksSpan) {
  EchelonBasis basis(3);
  EXPECT_TRUE(basis.insert({1, 1, 0}));
  EXPECT_TRUE(basis.insert({0, 1, 1}));
  EXPECT_FALSE(basis.insert({1, 2, 1}));
  EXPECT_TRUE(basis.contains({2, 3, 1}));
  EXPECT_FALSE(basis.contains({0, 0, 1}));
  basis.pop();
  EXPECT_EQ(basis.size(), 1u);
  EXPECT_FALSE(basis.contains({0, 1, 1}));
}

TEST(Subset, Helpers) {
  const Subset s = singleton(0) | singleton(3);
  EXPECT_EQ(cardinality(s), 2);
  EXPECT_TRUE(contains(s, 3));
  EXPECT_FALSE(contains(s, 1));
  EXPECT_EQ(to_indices(s), (std::vector<int>{0, 3}));
  EXPECT_EQ(format_subset(s), "{0,3}");
  EXPECT_TRUE(is_subset(singleton(3), s));
  EXPECT_EQ(full_set(4), Subset{15});
}
