#pragma once

// Small dense real matrix kernel shared by every other module.
//
// Matrices are plain Eigen::MatrixXd values. Group elements (rotations,
// orthogonal matrices) are wrapped in types whose constructors validate the
// group invariants, so a Rotation in hand is always on SO(n) to within
// tol::orth.

#include <Eigen/Core>
#include <random>

#include "rpolar/error.hpp"

namespace rpolar {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Rng = std::mt19937_64;

namespace tol {
inline constexpr double orth = 1e-10;
inline constexpr double sym = 1e-10;
inline constexpr double det = 1e-10;
inline constexpr double recon = 1e-10;
// Largest orthogonality drift that construction silently projects away.
inline constexpr double reproject = 1e-8;
}  // namespace tol

void require_square(const Mat& x, const char* what);
void require_finite(const Mat& x, const char* what);
void require_same_dim(const Mat& x, const Mat& y, const char* what);

Mat sym_part(const Mat& x);
Mat skew_part(const Mat& x);
double frob_inner(const Mat& x, const Mat& y);
double frob_norm_sq(const Mat& x);
double frob_norm(const Mat& x);

/// ‖QᵀQ − 1‖_F.
double orthogonality_defect(const Mat& q);

/// Closest orthogonal matrix in Frobenius norm (U Vᵀ from the SVD).
Mat nearest_orthogonal(const Mat& x);

class Rotation {
 public:
  static Rotation identity(int n);

  /// Validates R ∈ SO(n). Drift up to tol::reproject is projected away,
  /// anything beyond that (or det ≤ 0) throws NotRotation.
  explicit Rotation(Mat r);

  const Mat& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }

  Rotation transpose() const;
  Rotation operator*(const Rotation& other) const;

 private:
  Mat m_;
};

class OrthMatrix {
 public:
  static OrthMatrix identity(int n);

  /// Validates T ∈ O(n) with the same projection rule as Rotation.
  explicit OrthMatrix(Mat t);

  const Mat& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  int det_sign() const noexcept { return det_sign_; }

  /// Conjugates x into this basis: T⁻¹ x T = Tᵀ x T.
  Mat conjugate(const Mat& x) const { return m_.transpose() * x * m_; }

 private:
  Mat m_;
  int det_sign_ = 1;
};

struct PolarFactors {
  Rotation rot;
  Mat stretch;
  /// Singular values of F, sorted descending.
  Vec singular_values;
  /// Right singular vectors W with stretch = W diag(singular_values) Wᵀ.
  Mat right_basis;
};

/// Right polar decomposition F = rot · stretch via the SVD F = V Σ Wᵀ.
PolarFactors polar_decompose(const Mat& f);

/// exp(scale · A) for skew A, re-orthonormalized onto SO(n).
Rotation exp_skew(const Mat& a, double scale = 1.0);

/// Haar-distributed rotation; deterministic for a given generator state.
Rotation random_rotation(int n, Rng& rng);

/// Planar rotation [[c, −s], [s, c]].
Mat planar_rotation(double angle);

}  // namespace rpolar
