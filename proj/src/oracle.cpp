#include "rpolar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rpolar {

namespace {

Mat right_scaled(const Mat& r, const DiagParams& d) {
  Mat out = r;
  for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) *= d[static_cast<int>(j)];
  return out;
}

void require_dim(const Rotation& r, const DiagParams& d, const char* what) {
  if (r.dim() != d.dim()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimension mismatch");
  }
}

// Rᵀ D as a dense matrix.
Mat rt_d(const Rotation& r, const DiagParams& d) {
  return right_scaled(r.matrix().transpose(), d);
}

template <class Rhs, class Energy>
FlowTrajectory lie_euler(const Rotation& r0, const DiagParams& d, const FlowOptions& opts,
                         Rhs&& body_velocity, Energy&& energy_of, const char* what) {
  require_dim(r0, d, what);
  if (!(opts.step > 0.0) || !(opts.t_end >= 0.0)) {
    throw Error(ErrorCode::InvalidParams, std::string(what) + ": need step > 0 and t_end >= 0");
  }
  FlowTrajectory traj;
  traj.step_size = opts.step;
  Rotation r = r0;
  double e = energy_of(r);
  Mat v = body_velocity(r);
  traj.times.push_back(0.0);
  traj.states.push_back(r);
  traj.energies.push_back(e);
  const auto steps = static_cast<long>(std::ceil(opts.t_end / opts.step - 1e-12));
  for (long k = 1; k <= steps; ++k) {
    if (opts.gtol > 0.0 && v.norm() <= opts.gtol) break;
    r = r * exp_skew(v, opts.step);
    const double e_next = energy_of(r);
    if (e_next > e + opts.increase_tol) {
      throw Error(ErrorCode::StepTooLarge,
                  std::string(what) + ": energy increased by " + std::to_string(e_next - e) +
                      " at t = " + std::to_string(k * opts.step) + "; try halving the step");
    }
    e = e_next;
    v = body_velocity(r);
    traj.times.push_back(static_cast<double>(k) * opts.step);
    traj.states.push_back(r);
    traj.energies.push_back(e);
  }
  traj.final_grad_norm = v.norm();
  return traj;
}

}  // namespace

Mat riemannian_gradient(const Rotation& r, const DiagParams& d) {
  require_dim(r, d, "riemannian_gradient");
  Mat x = rt_d(r, d);
  x -= Mat::Identity(d.dim(), d.dim());
  return 0.5 * skew_part(x * x);
}

DescentResult descend(const Rotation& r0, const DiagParams& d, const DescentOptions& opts) {
  require_dim(r0, d, "descend");
  Rotation r = r0;
  double w = energy(r, d);
  Mat a = riemannian_gradient(r, d);
  double g2 = a.squaredNorm();
  double trial = opts.initial_step;
  int it = 0;
  bool converged = std::sqrt(g2) <= opts.gtol;
  for (; it < opts.max_iterations && !converged; ++it) {
    double t = trial;
    bool accepted = false;
    Rotation next = r;
    double w_next = w;
    Mat a_next;
    for (int bt = 0; bt < 60; ++bt) {
      next = r * exp_skew(a, -t);
      w_next = energy(next, d);
      // Directional derivative of W along −t·A is −2t‖A‖².
      const double predicted = 2.0 * t * g2;
      if (w_next <= w - opts.armijo * predicted) {
        accepted = true;
      } else if (predicted <= 1e-14 * (1.0 + std::abs(w))) {
        // Value differences are at rounding level; fall back to the
        // gradient norm as the progress measure.
        a_next = riemannian_gradient(next, d);
        accepted = a_next.squaredNorm() < g2;
      }
      if (accepted) break;
      t *= opts.shrink;
    }
    if (!accepted) break;
    if (a_next.size() == 0) a_next = riemannian_gradient(next, d);
    const double g2_next = a_next.squaredNorm();
    trial = opts.initial_step;
    if (opts.bb_trial) {
      // s = −t·A, y = A_next − A in body coordinates.
      const Mat s = -t * a;
      const double sy = frob_inner(s, a_next - a);
      if (sy > 0.0) trial = std::clamp(s.squaredNorm() / sy, 1e-10, 1e4);
    }
    r = std::move(next);
    w = w_next;
    a = std::move(a_next);
    g2 = g2_next;
    converged = std::sqrt(g2) <= opts.gtol;
  }
  return DescentResult{std::move(r), w, std::sqrt(g2), it, converged};
}

Rng start_rng(std::uint64_t seed, int start_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffU),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start_index)};
  return Rng(seq);
}

DescentReport brute_force_min(const DiagParams& d, int n_starts, std::uint64_t seed,
                              const DescentOptions& opts) {
  if (d.dim() > brute_force_max_n) {
    throw Error(ErrorCode::TooLarge, "brute_force_min: n = " + std::to_string(d.dim()) +
                                         " exceeds " + std::to_string(brute_force_max_n));
  }
  if (n_starts < 1) throw Error(ErrorCode::InvalidParams, "brute_force_min: need n_starts >= 1");
  DescentReport report{0.0, Rotation::identity(d.dim()), n_starts, 0, opts.gtol, seed, {}};
  report.limits.reserve(static_cast<std::size_t>(n_starts));
  for (int s = 0; s < n_starts; ++s) {
    Rng rng = start_rng(seed, s);
    report.limits.push_back(descend(random_rotation(d.dim(), rng), d, opts));
  }
  // Min-reduction; ties keep the lowest start index.
  std::size_t best = 0;
  for (std::size_t s = 0; s < report.limits.size(); ++s) {
    if (report.limits[s].converged) ++report.n_converged;
    if (report.limits[s].value < report.limits[best].value) best = s;
  }
  report.best_value = report.limits[best].value;
  report.best_rotation = report.limits[best].rotation;
  return report;
}

FlowTrajectory integrate_flow(const Rotation& r0, const DiagParams& d, const FlowOptions& opts) {
  return lie_euler(
      r0, d, opts, [&d](const Rotation& r) -> Mat { return -riemannian_gradient(r, d); },
      [&d](const Rotation& r) { return energy(r, d); }, "integrate_flow");
}

double biot_energy(const Rotation& r, const DiagParams& d) {
  require_dim(r, d, "biot_energy");
  return 0.5 * (right_scaled(r.matrix(), d) - Mat::Identity(d.dim(), d.dim())).squaredNorm();
}

FlowTrajectory biot_flow(const Rotation& r0, const DiagParams& d, const FlowOptions& opts) {
  return lie_euler(
      r0, d, opts, [&d](const Rotation& r) -> Mat { return skew_part(rt_d(r, d)); },
      [&d](const Rotation& r) { return biot_energy(r, d); }, "biot_flow");
}

}  // namespace rpolar
