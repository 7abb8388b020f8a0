#include "rpolar/blockdiag.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rpolar {

namespace {

struct Piece {
  Mat columns;  // orthonormal basis of the invariant subspace, in source coordinates
  double mu = 0.0;
};

// Orthonormal basis of the orthogonal complement of the column span of v.
Mat orthogonal_complement(const Mat& v) {
  const auto m = v.rows();
  const auto k = v.cols();
  Eigen::HouseholderQR<Mat> qr(v);
  const Mat q = qr.householderQ() * Mat::Identity(m, m);
  return q.rightCols(m - k);
}

double eigen_residual(const Mat& a, const Vec& w) {
  const Vec aw = a * w;
  return (aw - w.dot(aw) * w).norm();
}

// Common eigenvector of ZᵀZ and ZZᵀ. The two commute whenever Z² is a
// multiple of the identity, so ZZᵀ maps each eigenspace of ZᵀZ into itself
// and diagonalizing its restriction there yields common eigenvectors. Every
// candidate is scored by its residual and the best one is returned.
Vec common_eigenvector(const Mat& z) {
  const Mat ztz = sym_part(z.transpose() * z);
  const Mat zzt = sym_part(z * z.transpose());
  Vec best;
  double best_residual = std::numeric_limits<double>::infinity();
  for (const auto& cluster : eigsplit_symmetric(ztz)) {
    const Mat& p = cluster.basis;
    Eigen::SelfAdjointEigenSolver<Mat> restricted(sym_part(p.transpose() * zzt * p));
    const Mat& vecs = restricted.eigenvectors();
    for (Eigen::Index c = vecs.cols() - 1; c >= 0; --c) {
      Vec w = p * vecs.col(c);
      w.normalize();
      const double r = eigen_residual(ztz, w) + eigen_residual(zzt, w);
      if (r < best_residual) {
        best_residual = r;
        best = std::move(w);
      }
    }
  }
  return best;
}

// Unit vector along the component of v orthogonal to the unit vector w.
Vec orthogonal_direction(const Vec& v, const Vec& w) {
  Vec u = v - w.dot(v) * w;
  // Second Gram-Schmidt pass keeps u orthogonal when v is nearly parallel to w.
  u -= w.dot(u) * w;
  return u.normalized();
}

// Splits an m-dimensional Y with Y² = λ·1 into invariant pieces, following
// the induction: find V (dim 1 or 2) invariant under Y and Yᵀ, record it,
// recurse on V^⊥.
std::vector<Piece> split_lambda_space(const Mat& y, double lambda, double case_tol) {
  const auto m = y.rows();
  std::vector<Piece> pieces;
  Mat remaining = Mat::Identity(m, m);
  while (remaining.cols() > 0) {
    if (remaining.cols() == 1) {
      pieces.push_back({remaining, lambda});
      break;
    }
    const Mat z = remaining.transpose() * y * remaining;
    const Vec w = common_eigenvector(z);
    const Vec zw = z * w;
    const Vec ztw = z.transpose() * w;
    const bool w_eig_of_z = (zw - w.dot(zw) * w).norm() <= case_tol;
    const bool w_eig_of_zt = (ztw - w.dot(ztw) * w).norm() <= case_tol;

    Mat v;
    if (w_eig_of_z && w_eig_of_zt) {
      v = w;  // span{w}
    } else {
      // span{w, Zᵀw} when w is an eigenvector of Z only, span{w, Zw} otherwise.
      const Vec partner = w_eig_of_z ? ztw : zw;
      v.resize(w.size(), 2);
      v.col(0) = w;
      v.col(1) = orthogonal_direction(partner, w);
    }
    pieces.push_back({remaining * v, lambda});
    if (v.cols() == remaining.cols()) break;
    remaining = remaining * orthogonal_complement(v);
  }
  return pieces;
}

BlockDecomposition assemble(const Mat& x, std::vector<Piece> pieces) {
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    if (a.mu != b.mu) return a.mu > b.mu;
    return a.columns.cols() > b.columns.cols();
  });
  const auto n = x.rows();
  Mat t(n, n);
  Eigen::Index col = 0;
  for (const auto& p : pieces) {
    t.middleCols(col, p.columns.cols()) = p.columns;
    col += p.columns.cols();
  }
  OrthMatrix basis(std::move(t));
  const Mat conj = basis.conjugate(x);
  std::vector<Block> blocks;
  blocks.reserve(pieces.size());
  col = 0;
  for (const auto& p : pieces) {
    const auto k = p.columns.cols();
    blocks.push_back({static_cast<int>(k), conj.block(col, col, k, k), p.mu});
    col += k;
  }
  return BlockDecomposition{std::move(basis), std::move(blocks), static_cast<int>(n)};
}

}  // namespace

Mat BlockDecomposition::block_diagonal() const {
  Mat out = Mat::Zero(source_dim, source_dim);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.size, b.size) = b.entries;
    at += b.size;
  }
  return out;
}

double BlockDecomposition::block_norm_sq() const {
  double total = 0.0;
  for (const auto& b : blocks) total += b.entries.squaredNorm();
  return total;
}

bool is_symmetric_square(const Mat& x, double tol) {
  require_square(x, "is_symmetric_square");
  const Mat sq = x * x;
  return skew_part(sq).norm() <= tol * (1.0 + x.squaredNorm());
}

std::vector<EigenCluster> eigsplit_symmetric(const Mat& s, double scale) {
  require_square(s, "eigsplit_symmetric");
  require_finite(s, "eigsplit_symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(sym_part(s));
  const Vec& ev = es.eigenvalues();  // ascending
  const Mat& vecs = es.eigenvectors();
  if (scale <= 0.0) scale = ev.cwiseAbs().maxCoeff();
  const double gap = 1e-8 * scale;

  std::vector<EigenCluster> clusters;
  Eigen::Index start = 0;
  const auto n = ev.size();
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || ev(i) - ev(i - 1) > gap) {
      const auto len = i - start;
      clusters.push_back({ev.segment(start, len).mean(), vecs.middleCols(start, len)});
      start = i;
    }
  }
  std::reverse(clusters.begin(), clusters.end());
  return clusters;
}

BlockDecomposition block_lemma(const Mat& y, double lambda) {
  require_square(y, "block_lemma");
  require_finite(y, "block_lemma");
  const auto n = y.rows();
  const double scale = 1.0 + y.squaredNorm();
  const double residual = (y * y - lambda * Mat::Identity(n, n)).norm();
  if (!(residual <= tol_block * scale)) {
    throw Error(ErrorCode::NotLambdaSquare,
                "block_lemma: ||Y^2 - lambda*1|| = " + std::to_string(residual));
  }
  const double case_tol = tol_block * (1.0 + y.norm());
  return assemble(y, split_lambda_space(y, lambda, case_tol));
}

BlockDecomposition block_diagonalize(const Mat& x) {
  require_square(x, "block_diagonalize");
  require_finite(x, "block_diagonalize");
  if (!is_symmetric_square(x, tol_block)) {
    throw Error(ErrorCode::NotSymmetricSquare,
                "block_diagonalize: X^2 is not symmetric within tolerance");
  }
  const Mat s = sym_part(x * x);
  const double x_norm_sq = x.squaredNorm();
  // Eigenvalues of the computed X² carry rounding noise of order ε‖X‖², which
  // for a nilpotent part dwarfs max|λ|. Clustering on the scale 1 + ‖X‖²
  // matches the tolerance under which X² was accepted as symmetric.
  const double scale = 1.0 + x_norm_sq;
  const double case_tol = tol_block * (1.0 + x.norm());

  std::vector<Piece> pieces;
  for (const auto& cluster : eigsplit_symmetric(s, scale)) {
    const Mat& b = cluster.basis;
    const Mat y = b.transpose() * x * b;
    for (auto& p : split_lambda_space(y, cluster.lambda, case_tol)) {
      pieces.push_back({b * p.columns, p.mu});
    }
  }
  return assemble(x, std::move(pieces));
}

}  // namespace rpolar
