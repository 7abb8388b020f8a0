#pragma once

// Orthogonal block-diagonalization of real matrices whose square is
// symmetric.
//
// Given X with X² ∈ Sym(n), block_diagonalize() returns T ∈ O(n) such that
// TᵀXT = diag(B_1, …, B_r) with every block of size one or two and
// B_j² = μ_j·1. The construction splits ℝⁿ into the eigenspaces of X² (which
// X leaves invariant) and then, inside each eigenspace, peels off one- or
// two-dimensional subspaces that are invariant under both Y and Yᵀ.

#include <vector>

#include "rpolar/linalg.hpp"

namespace rpolar {

inline constexpr double tol_block = 1e-8;

struct Block {
  int size = 1;  // 1 or 2
  Mat entries;
  double mu = 0.0;
};

struct BlockDecomposition {
  OrthMatrix basis;
  std::vector<Block> blocks;
  int source_dim = 0;

  /// diag(blocks) as a dense source_dim × source_dim matrix.
  Mat block_diagonal() const;

  /// Σ_j ‖B_j‖_F².
  double block_norm_sq() const;
};

struct EigenCluster {
  double lambda = 0.0;
  Mat basis;  // orthonormal columns spanning the (clustered) eigenspace
};

/// ‖skew(X²)‖_F ≤ tol·(1 + ‖X‖_F²).
bool is_symmetric_square(const Mat& x, double tol = tol_block);

/// Eigendecomposition of a symmetric matrix with eigenvalues grouped when
/// consecutive gaps are at most 1e-8·scale. scale ≤ 0 selects max|λ|.
/// Clusters come out sorted by eigenvalue, descending.
std::vector<EigenCluster> eigsplit_symmetric(const Mat& s, double scale = 0.0);

/// Decomposition of a single Y with Y² = λ·1 into blocks of size ≤ 2.
BlockDecomposition block_lemma(const Mat& y, double lambda);

/// Full decomposition of X with symmetric square. Blocks are ordered by μ
/// descending, 2×2 blocks ahead of 1×1 blocks with the same μ.
BlockDecomposition block_diagonalize(const Mat& x);

}  // namespace rpolar
