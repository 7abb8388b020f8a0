#include <gtest/gtest.h>

#include "rpolar/blockdiag.hpp"
#include "test_support.hpp"

namespace rpolar {
namespace {

Mat schur_example() {
  Mat y(4, 4);
  y << 1, 0, 1, 1, 0, 1, 1, 1, 0, 0, -1, 0, 0, 0, 0, -1;
  return y;
}

void expect_valid(const Mat& x, const BlockDecomposition& bd) {
  const auto n = x.rows();
  const Mat& t = bd.basis.matrix();
  EXPECT_LE((t.transpose() * t - Mat::Identity(n, n)).norm(), 1e-10);
  int total = 0;
  for (const auto& b : bd.blocks) {
    ASSERT_TRUE(b.size == 1 || b.size == 2);
    total += b.size;
    const Mat sq = b.entries * b.entries - b.mu * Mat::Identity(b.size, b.size);
    EXPECT_LE(sq.norm(), 1e-8);
  }
  EXPECT_EQ(total, n);
  EXPECT_LE((t.transpose() * x * t - bd.block_diagonal()).norm(), 1e-8 * (1.0 + x.norm()));
  EXPECT_LE(std::abs(bd.block_norm_sq() - x.squaredNorm()), 1e-8 * std::max(1.0, x.squaredNorm()));
}

TEST(SymmetricSquare, Membership) {
  Mat s = Mat::Random(4, 4);
  s = (s + s.transpose()).eval();
  EXPECT_TRUE(is_symmetric_square(s));
  Mat traceless(2, 2);
  traceless << 0.3, 5.0, -1.7, -0.3;
  EXPECT_TRUE(is_symmetric_square(traceless));
  Mat upper(2, 2);
  upper << 1, 1, 0, 2;  // square has off-diagonal entries 3 and 0
  EXPECT_FALSE(is_symmetric_square(upper));
}

TEST(EigSplit, Clusters) {
  const auto one = eigsplit_symmetric(Mat::Identity(3, 3));
  ASSERT_EQ(one.size(), 1U);
  EXPECT_DOUBLE_EQ(one[0].lambda, 1.0);
  EXPECT_EQ(one[0].basis.cols(), 3);

  const auto two = eigsplit_symmetric(testing::diag_matrix({4, 4, 1}));
  ASSERT_EQ(two.size(), 2U);
  EXPECT_DOUBLE_EQ(two[0].lambda, 4.0);
  EXPECT_EQ(two[0].basis.cols(), 2);
  EXPECT_DOUBLE_EQ(two[1].lambda, 1.0);
  EXPECT_EQ(two[1].basis.cols(), 1);

  const Mat y = schur_example();
  const auto sq = eigsplit_symmetric(y * y);
  ASSERT_EQ(sq.size(), 1U);
  EXPECT_NEAR(sq[0].lambda, 1.0, 1e-14);
  EXPECT_EQ(sq[0].basis.cols(), 4);
}

TEST(EigSplit, BasesAreOrthonormalAndComplete) {
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 8; ++n) {
    const Mat x = testing::synthesize_symmetric_square(n, rng);
    const Mat s = 0.5 * (x * x + (x * x).transpose());
    Mat all(n, 0);
    for (const auto& c : eigsplit_symmetric(s)) {
      Mat grown(n, all.cols() + c.basis.cols());
      grown << all, c.basis;
      all = grown;
    }
    ASSERT_EQ(all.cols(), n);
    EXPECT_LE((all.transpose() * all - Mat::Identity(n, n)).norm(), 1e-12);
  }
}

TEST(BlockLemma, IdentityGivesUnitBlocks) {
  const auto bd = block_lemma(Mat::Identity(3, 3), 1.0);
  ASSERT_EQ(bd.blocks.size(), 3U);
  for (const auto& b : bd.blocks) {
    EXPECT_EQ(b.size, 1);
    EXPECT_NEAR(b.entries(0, 0), 1.0, 1e-14);
  }
  expect_valid(Mat::Identity(3, 3), bd);
}

TEST(BlockLemma, QuarterTurnIsIrreducible) {
  Mat y(2, 2);
  y << 0, -1, 1, 0;
  const auto bd = block_lemma(y, -1.0);
  ASSERT_EQ(bd.blocks.size(), 1U);
  EXPECT_EQ(bd.blocks[0].size, 2);
  EXPECT_DOUBLE_EQ(bd.blocks[0].mu, -1.0);
  expect_valid(y, bd);
}

TEST(BlockLemma, SchurFormInput) {
  const Mat y = schur_example();
  ASSERT_LE((y * y - Mat::Identity(4, 4)).norm(), 0.0);
  const auto bd = block_lemma(y, 1.0);
  expect_valid(y, bd);
  EXPECT_NEAR(bd.block_norm_sq(), 8.0, 1e-12);
  // Y is not symmetric, so some block must be a non-symmetric 2×2.
  bool has_pair = false;
  for (const auto& b : bd.blocks) has_pair = has_pair || b.size == 2;
  EXPECT_TRUE(has_pair);
}

TEST(BlockLemma, RejectsWrongLambda) {
  try {
    block_lemma(Mat::Identity(2, 2), 4.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotLambdaSquare);
  }
}

TEST(BlockDiagonalize, SymmetricInputGivesUnitBlocks) {
  std::mt19937_64 rng(12);
  Mat s = Mat::Random(5, 5);
  s = (s + s.transpose()).eval();
  const auto bd = block_diagonalize(s);
  for (const auto& b : bd.blocks) EXPECT_EQ(b.size, 1);
  expect_valid(s, bd);
}

TEST(BlockDiagonalize, SchurFormInput) {
  const Mat y = schur_example();
  const auto bd = block_diagonalize(y);
  expect_valid(y, bd);
  EXPECT_NEAR(bd.block_norm_sq(), 8.0, 1e-12);
  for (const auto& b : bd.blocks) EXPECT_NEAR(b.mu, 1.0, 1e-12);
}

TEST(BlockDiagonalize, OrdersBlocksByMuThenSize) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto bd = block_diagonalize(testing::synthesize_symmetric_square(6, rng));
    for (std::size_t j = 1; j < bd.blocks.size(); ++j) {
      const auto& p = bd.blocks[j - 1];
      const auto& q = bd.blocks[j];
      EXPECT_GE(p.mu, q.mu - 1e-8);
      if (std::abs(p.mu - q.mu) <= 1e-8) EXPECT_GE(p.size, q.size);
    }
  }
}

TEST(BlockDiagonalize, Deterministic) {
  std::mt19937_64 rng(14);
  const Mat x = testing::synthesize_symmetric_square(7, rng);
  const auto a = block_diagonalize(x);
  const auto b = block_diagonalize(x);
  EXPECT_EQ(a.basis.matrix(), b.basis.matrix());
}

TEST(BlockDiagonalize, RejectsNonSymmetricSquare) {
  Mat upper(2, 2);
  upper << 1, 1, 0, 2;
  try {
    block_diagonalize(upper);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSymmetricSquare);
  }
}

class BlockFuzz : public ::testing::TestWithParam<int> {};

TEST_P(BlockFuzz, ThousandSynthesizedMatrices) {
  const int n = GetParam();
  std::mt19937_64 rng(1000 + static_cast<unsigned>(n));
  for (int trial = 0; trial < 1000; ++trial) {
    const Mat x = testing::synthesize_symmetric_square(n, rng);
    ASSERT_TRUE(is_symmetric_square(x)) << "trial " << trial;
    try {
      expect_valid(x, block_diagonalize(x));
    } catch (const Error& e) {
      FAIL() << "trial " << trial << ": " << e.what() << "\n" << x;
    }
    if (::testing::Test::HasFailure()) {
      ADD_FAILURE() << "n = " << n << ", trial " << trial << "\n" << x;
      return;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Dimensions, BlockFuzz, ::testing::Range(2, 9));

}  // namespace
}  // namespace rpolar
