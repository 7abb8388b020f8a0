#pragma once

// Critical points of W(R; D) = ‖sym(RD − 1)‖² on SO(n).
//
// Critical points are labelled by partitions of the index set into subsets
// of size one or two, with a determinant sign per subset and, for two-element
// subsets, the sign of the rotation angle. Indices are 0-based here and refer
// to the entries of D in the order the caller supplied them; the JSON form
// (see serialize.hpp) is 1-based.

#include <compare>
#include <functional>
#include <vector>

#include "rpolar/linalg.hpp"

namespace rpolar {

/// Relative slack for the strict inequalities d_i + d_j > 2 and
/// |d_i − d_j| > 2. Sums within 2·(1 + boundary_rel) count as "not above 2".
inline constexpr double boundary_rel = 1e-12;
/// Entries closer than this (relative to max d) are treated as tied.
inline constexpr double tie_rel = 1e-12;

/// True iff x > 2 with the boundary slack above.
bool exceeds_two(double x);

class DiagParams {
 public:
  /// Throws InvalidParams unless every entry is finite and positive.
  explicit DiagParams(std::vector<double> d);

  int dim() const noexcept { return static_cast<int>(d_.size()); }
  double operator[](int i) const { return d_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const noexcept { return d_; }

  /// perm()[k] is the caller's index of the k-th largest entry.
  const std::vector<int>& perm() const noexcept { return perm_; }
  std::vector<double> sorted() const;

  /// False when two entries coincide (within tie_rel).
  bool strict() const noexcept { return strict_; }

  Mat matrix() const;

 private:
  std::vector<double> d_;
  std::vector<int> perm_;
  bool strict_ = true;
};

struct SubsetLabel {
  int first = 0;
  int second = -1;  // -1 marks a singleton
  int det_sign = 1;
  int angle_sign = 1;  // only meaningful for pairs

  bool is_pair() const noexcept { return second >= 0; }
  friend auto operator<=>(const SubsetLabel&, const SubsetLabel&) = default;
};

struct PartitionLabel {
  std::vector<SubsetLabel> subsets;

  /// Product of the determinant signs, i.e. det R of the realized matrix.
  int det_parity() const;
  int pair_count() const;
  /// Sorts subsets by their first index and orders each pair ascending.
  PartitionLabel normalized() const;

  friend bool operator==(const PartitionLabel& a, const PartitionLabel& b) {
    return a.normalized().subsets == b.normalized().subsets;
  }
};

struct CriticalPoint {
  PartitionLabel label;
  Rotation rotation;
  double value = 0.0;
};

/// Feasibility of a two-element subset with the given determinant sign.
bool pair_feasible(double di, double dj, int det_sign);

/// Throws InfeasibleLabel unless the label partitions {0..n−1} with signs ±1.
void validate_structure(const PartitionLabel& label, const DiagParams& d);

/// Throws InfeasibleLabel unless the label partitions {0..n−1} and every
/// pair satisfies its feasibility inequality. With require_rotation the
/// determinant parity must also be +1.
void validate_label(const PartitionLabel& label, const DiagParams& d,
                    bool require_rotation);

double energy(const Rotation& r, const DiagParams& d);
double energy(const Mat& r, const DiagParams& d);

/// μ‖sym(R̄ᵀF − 1)‖² + μ_c‖skew(R̄ᵀF − 1)‖².
double energy_weighted(const Rotation& r_bar, const Mat& f, double mu, double mu_c);

/// ‖skew((RD − 1)²)‖_F ≤ tol·(1 + ‖D‖_F²).
bool is_critical(const Rotation& r, const DiagParams& d, double tol);

/// Sum formula over the label's subsets. Parity is not required, so labels
/// of critical points of W on O(n) are accepted as well.
double critical_value(const PartitionLabel& label, const DiagParams& d);

/// The same sum evaluated for any well-formed label, feasible or not. Only
/// the partition structure is checked.
double formal_value(const PartitionLabel& label, const DiagParams& d);

/// The orthogonal matrix for a label, honouring the stored angle signs. Its
/// determinant equals label.det_parity().
Mat realize_matrix(const PartitionLabel& label, const DiagParams& d);

/// All critical points on SO(n) carried by the label: one per choice of
/// angle signs on its non-diagonal pairs.
std::vector<CriticalPoint> realize(const PartitionLabel& label, const DiagParams& d);

inline constexpr int default_max_n = 10;

/// Visits every critical point in a fixed order; returning false from the
/// visitor stops the walk. Throws TooLarge when n > max_n.
void for_each_critical(const DiagParams& d,
                       const std::function<bool(const CriticalPoint&)>& visit,
                       int max_n = default_max_n);

std::vector<CriticalPoint> enumerate_critical(const DiagParams& d,
                                              int max_n = default_max_n);

}  // namespace rpolar
