#pragma once

// Global minimizers of W(R; D) = ‖sym(RD − 1)‖² over SO(n).
//
// With d_1 > … > d_n > 0 sorted descending and k the largest integer with
// d_{2k−1} + d_{2k} > 2, every global minimizer pairs the indices
// {1,2}, …, {2k−1, 2k} into planar rotations with cos α_i = 2/(d_{2i−1} + d_{2i})
// and fixes the remaining axes. Both signs of each α_i are optimal, giving
// 2^k minimizers and the reduced energy
//
//   W_red(D) = ½ Σ_{i≤k} (d_{2i−1} − d_{2i})² + Σ_{i>2k} (d_i − 1)².

#include <string_view>
#include <vector>

#include "rpolar/critical.hpp"

namespace rpolar {

enum class Flag {
  TiesNotStrict,        // two entries of D coincide
  NonIsolated,          // minimizers may form a continuum; rotations are representatives
  BoundaryCase,         // some leading pair sum lies within 1e-9 of 2
  OrientationReversed,  // signed D needs det J = −1; no minimizers reported
};

std::string_view to_string(Flag flag);

struct MinimizerSet {
  int k = 0;
  std::vector<Rotation> rotations;
  double reduced_energy = 0.0;
  PartitionLabel label;
  std::vector<double> cos_alphas;
  std::vector<Flag> flags;

  bool has(Flag f) const;
};

/// Largest k with d_{2k−1} + d_{2k} > 2 over the sorted entries.
int optimal_k(const DiagParams& d);

/// Closed-form reduced energy ½Σ(d_{2i−1} − d_{2i})² + Σ_{i>2k}(d_i − 1)².
double reduced_energy(const DiagParams& d);

/// All global minimizers, in the caller's index order.
MinimizerSet rpolar_diag(const DiagParams& d);

/// Absolute minimizers R̄ of ‖sym(R̄ᵀF − 1)‖² for det F > 0.
MinimizerSet rpolar_full(const Mat& f);

/// The unique minimizer polar(F) for the classical range μ_c ≥ μ > 0.
Rotation rpolar_classical(const Mat& f, double mu, double mu_c);

enum class SchemeStepKind { SignFlip, Disentangle, Shift, Exhaust };

std::string_view to_string(SchemeStepKind kind);

struct SchemeStep {
  SchemeStepKind kind;
  PartitionLabel before;
  PartitionLabel after;
  double value_before = 0.0;
  double value_after = 0.0;

  bool is_noop() const { return before == after; }
};

struct SchemeTrace {
  std::vector<SchemeStep> steps;
  /// False when the start label is well formed but not itself a critical
  /// point on SO(n); its value is then the formal sum.
  bool start_is_critical = true;

  const PartitionLabel& final_label() const { return steps.back().after; }
  double final_value() const { return steps.back().value_after; }
};

/// Walks from a starting label to the optimal label through the four label
/// transformations (sign flip, disentangling nested pairs, shifting pairs to
/// the leading indices, exhausting adjacent singletons). The start only needs
/// d_i + d_j > 2 on its pairs, so that the sign flip lands on a critical
/// point. The value never increases along the trace.
SchemeTrace scheme_minimize(const PartitionLabel& start, const DiagParams& d);

/// True when both labels have the same subsets and determinant signs,
/// ignoring angle signs.
bool same_partition(const PartitionLabel& a, const PartitionLabel& b);

struct Reflection {
  DiagParams abs_d;
  std::vector<int> signs;  // diagonal of J, with J·D = |D|
  int det_sign = 1;        // det J
  bool orientation_reversed() const { return det_sign < 0; }
};

/// Reduces a signed diagonal (d_i ≠ 0, d_i + d_j ≠ 0) to |D| and J.
Reflection reflect_negative(const std::vector<double>& d_signed);

/// Minimizers for a signed diagonal. With det J = +1 these are R'·J for the
/// minimizers R' of |D|; with det J = −1 the set is empty and flagged
/// OrientationReversed. The label always refers to |D|.
MinimizerSet rpolar_signed(const std::vector<double>& d_signed);

}  // namespace rpolar
