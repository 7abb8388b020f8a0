#include "rpolar/linalg.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

namespace rpolar {

namespace {

// Newton-Schulz steps X ← ½ X (3 − XᵀX); quadratic convergence for the
// small drifts accepted by the group wrappers.
Mat orthonormalize_near(Mat x) {
  const auto n = x.rows();
  const Mat eye = Mat::Identity(n, n);
  double prev = orthogonality_defect(x);
  for (int it = 0; it < 6 && prev > 1e-15; ++it) {
    Mat next = 0.5 * x * (3.0 * eye - x.transpose() * x);
    const double d = orthogonality_defect(next);
    if (d >= prev) break;
    x = std::move(next);
    prev = d;
  }
  return x;
}

Mat validated_group_element(Mat m, ErrorCode code, const char* what) {
  require_square(m, what);
  require_finite(m, what);
  const double drift = orthogonality_defect(m);
  if (!(drift <= tol::reproject)) {
    throw Error(code, std::string(what) + ": orthogonality defect " +
                          std::to_string(drift) + " exceeds " +
                          std::to_string(tol::reproject));
  }
  if (drift > 0.0) m = orthonormalize_near(std::move(m));
  return m;
}

}  // namespace

void require_square(const Mat& x, const char* what) {
  if (x.rows() != x.cols() || x.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": expected a non-empty square matrix, got " +
                    std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

void require_finite(const Mat& x, const char* what) {
  if (!x.allFinite()) {
    throw Error(ErrorCode::NonFinite, std::string(what) + ": non-finite entry");
  }
}

void require_same_dim(const Mat& x, const Mat& y, const char* what) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dimension mismatch " +
                    std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                    " vs " + std::to_string(y.rows()) + "x" +
                    std::to_string(y.cols()));
  }
}

Mat sym_part(const Mat& x) {
  require_square(x, "sym_part");
  const auto n = x.rows();
  Mat s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = x(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      s(i, j) = s(j, i) = 0.5 * (x(i, j) + x(j, i));
    }
  }
  return s;
}

// Defined as x − sym_part(x) so that the two parts add back to x exactly.
Mat skew_part(const Mat& x) { return x - sym_part(x); }

double frob_inner(const Mat& x, const Mat& y) {
  require_same_dim(x, y, "frob_inner");
  return x.cwiseProduct(y).sum();
}

double frob_norm_sq(const Mat& x) { return x.squaredNorm(); }

double frob_norm(const Mat& x) { return x.norm(); }

double orthogonality_defect(const Mat& q) {
  return (q.transpose() * q - Mat::Identity(q.cols(), q.cols())).norm();
}

Mat nearest_orthogonal(const Mat& x) {
  Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Rotation Rotation::identity(int n) {
  return Rotation(Mat::Identity(n, n));
}

Rotation::Rotation(Mat r)
    : m_(validated_group_element(std::move(r), ErrorCode::NotRotation,
                                 "Rotation")) {
  if (!(m_.determinant() > 0.0)) {
    throw Error(ErrorCode::NotRotation, "Rotation: determinant is not +1");
  }
}

Rotation Rotation::transpose() const { return Rotation(m_.transpose()); }

Rotation Rotation::operator*(const Rotation& other) const {
  if (dim() != other.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "Rotation product: dimension mismatch");
  }
  return Rotation(m_ * other.m_);
}

OrthMatrix OrthMatrix::identity(int n) { return OrthMatrix(Mat::Identity(n, n)); }

OrthMatrix::OrthMatrix(Mat t)
    : m_(validated_group_element(std::move(t), ErrorCode::NotOrthogonal,
                                 "OrthMatrix")),
      det_sign_(m_.determinant() > 0.0 ? 1 : -1) {}

PolarFactors polar_decompose(const Mat& f) {
  require_square(f, "polar_decompose");
  require_finite(f, "polar_decompose");
  const double det = f.determinant();
  if (!(det > 0.0)) {
    throw Error(ErrorCode::NonInvertibleOrReflective,
                "polar_decompose: det(F) = " + std::to_string(det) + " is not positive");
  }
  Eigen::JacobiSVD<Mat> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec sigma = svd.singularValues();  // nonnegative, descending
  if (!(sigma(sigma.size() - 1) > 1e-14 * sigma(0))) {
    throw Error(ErrorCode::Degenerate, "polar_decompose: F is numerically rank deficient");
  }
  // det F > 0 with Σ ≥ 0 forces det(V)·det(W) = +1, so V Wᵀ ∈ SO(n).
  const Mat v = svd.matrixU();
  const Mat w = svd.matrixV();
  Mat stretch = w * sigma.asDiagonal() * w.transpose();
  stretch = sym_part(stretch);
  return PolarFactors{Rotation(v * w.transpose()), std::move(stretch), sigma, w};
}

Rotation exp_skew(const Mat& a, double scale) {
  require_square(a, "exp_skew");
  require_finite(a, "exp_skew");
  if (!((a + a.transpose()).norm() <= tol::sym)) {
    throw Error(ErrorCode::NotSkew, "exp_skew: argument is not skew-symmetric");
  }
  const Mat x = scale * skew_part(a);
  const auto n = x.rows();
  if (n == 1) return Rotation::identity(1);
  if (n == 2) return Rotation(planar_rotation(x(1, 0)));
  if (n == 3) {
    // Rodrigues: exp(K) = 1 + sin θ/θ K + (1 − cos θ)/θ² K².
    const double theta = std::sqrt(0.5 * x.squaredNorm());
    const Mat eye = Mat::Identity(3, 3);
    if (theta < 1e-8) {
      return Rotation(eye + x + 0.5 * x * x);
    }
    return Rotation(eye + (std::sin(theta) / theta) * x +
                    ((1.0 - std::cos(theta)) / (theta * theta)) * (x * x));
  }
  Mat e = x.exp();
  return Rotation(std::move(e));
}

Rotation random_rotation(int n, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::DimensionMismatch, "random_rotation: n must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return Rotation(std::move(q));
}

Mat planar_rotation(double angle) {
  Mat r(2, 2);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  r << c, -s, s, c;
  return r;
}

}  // namespace rpolar
