#pragma once

// Independent numerical checks of the closed forms: Riemannian gradient
// descent on SO(n), multistart global search, and the two gradient flows.
// Nothing in here consults the critical-point classification.

#include <cstdint>
#include <vector>

#include "rpolar/critical.hpp"
#include "rpolar/linalg.hpp"

namespace rpolar {

/// Body-frame gradient A(R) = ½ skew((RᵀD − 1)²). Along R·exp(tB),
/// d/dt W(R exp(tB)) at t = 0 equals 2⟨A, B⟩.
Mat riemannian_gradient(const Rotation& r, const DiagParams& d);

struct DescentOptions {
  double gtol = 1e-9;
  int max_iterations = 20000;
  double armijo = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;
  /// Use the Barzilai-Borwein step as the first trial after the first
  /// iteration (still Armijo-checked).
  bool bb_trial = true;
};

struct DescentResult {
  Rotation rotation;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Geodesic descent R ← R·exp(−t·A(R)) with backtracking line search.
DescentResult descend(const Rotation& r0, const DiagParams& d,
                      const DescentOptions& opts = {});

struct DescentReport {
  double best_value = 0.0;
  Rotation best_rotation;
  int n_starts = 0;
  int n_converged = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  /// Limits of every start, in start order.
  std::vector<DescentResult> limits;
};

inline constexpr int brute_force_max_n = 8;

/// Per-start generator derived from (seed, start index).
Rng start_rng(std::uint64_t seed, int start_index);

/// Multistart descent from Haar-random rotations. Deterministic in seed.
DescentReport brute_force_min(const DiagParams& d, int n_starts, std::uint64_t seed,
                              const DescentOptions& opts = {});

struct FlowOptions {
  double step = 1e-2;
  double t_end = 100.0;
  /// Stop early once the body-frame gradient norm drops to this level
  /// (0 disables the early stop).
  double gtol = 0.0;
  /// Allowed per-step energy increase before StepTooLarge is thrown.
  double increase_tol = 1e-9;
};

struct FlowTrajectory {
  std::vector<double> times;
  std::vector<Rotation> states;
  std::vector<double> energies;
  double step_size = 0.0;
  double final_grad_norm = 0.0;
};

/// Lie-Euler integration of RᵀṘ = −½ skew((RᵀD − 1)²), the gradient flow of
/// ½‖sym(RD − 1)‖². Energies recorded are W(R; D).
FlowTrajectory integrate_flow(const Rotation& r0, const DiagParams& d,
                              const FlowOptions& opts = {});

/// ½‖RD − 1‖².
double biot_energy(const Rotation& r, const DiagParams& d);

/// Lie-Euler integration of RᵀṘ = skew(RᵀD), the gradient flow of
/// ½‖RD − 1‖². Energies recorded are biot_energy.
FlowTrajectory biot_flow(const Rotation& r0, const DiagParams& d,
                         const FlowOptions& opts = {});

}  // namespace rpolar
