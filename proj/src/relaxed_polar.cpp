#include "rpolar/relaxed_polar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rpolar/linalg.hpp"

namespace rpolar {

namespace {

constexpr double boundary_flag_tol = 1e-9;

std::vector<int> inverse(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[static_cast<std::size_t>(perm[k])] = static_cast<int>(k);
  return inv;
}

PartitionLabel relabel(const PartitionLabel& label, const std::vector<int>& map) {
  PartitionLabel out = label;
  for (auto& s : out.subsets) {
    s.first = map[static_cast<std::size_t>(s.first)];
    if (s.is_pair()) s.second = map[static_cast<std::size_t>(s.second)];
  }
  return out.normalized();
}

// Optimal label in sorted positions: k leading pairs, then singletons.
PartitionLabel leading_pairs_label(int n, int pairs) {
  PartitionLabel label;
  for (int i = 0; i < pairs; ++i) label.subsets.push_back({2 * i, 2 * i + 1, 1, 1});
  for (int i = 2 * pairs; i < n; ++i) label.subsets.push_back({i, -1, 1, 1});
  return label;
}

int count_leading_pairs(const std::vector<double>& sorted) {
  int k = 0;
  while (2 * k + 1 < static_cast<int>(sorted.size()) &&
         exceeds_two(sorted[static_cast<std::size_t>(2 * k)] +
                     sorted[static_cast<std::size_t>(2 * k + 1)])) {
    ++k;
  }
  return k;
}

bool near_boundary(const std::vector<double>& sorted, int k) {
  for (int i = 0; i <= k && 2 * i + 1 < static_cast<int>(sorted.size()); ++i) {
    const double s = sorted[static_cast<std::size_t>(2 * i)] +
                     sorted[static_cast<std::size_t>(2 * i + 1)];
    if (std::abs(s - 2.0) <= boundary_flag_tol) return true;
  }
  return false;
}

// Replaces the first nested pair {a,d} ⊃ {b,c} (a < b < c < d, sorted
// positions) by {a,b} ⊔ {c,d}, or by {a,b} ⊔ {c} ⊔ {d} when {c,d} is not
// feasible. Returns false when no nesting is left.
bool disentangle_once(PartitionLabel& pos, const std::vector<double>& ds) {
  auto& subs = pos.subsets;
  for (std::size_t p = 0; p < subs.size(); ++p) {
    if (!subs[p].is_pair()) continue;
    for (std::size_t q = 0; q < subs.size(); ++q) {
      if (q == p || !subs[q].is_pair()) continue;
      const int a = subs[p].first, d = subs[p].second;
      const int b = subs[q].first, c = subs[q].second;
      if (!(a < b && c < d)) continue;
      const int ap = subs[p].angle_sign;
      const int bp = subs[q].angle_sign;
      subs[p] = {a, b, 1, ap};
      if (pair_feasible(ds[static_cast<std::size_t>(c)], ds[static_cast<std::size_t>(d)], 1)) {
        subs[q] = {c, d, 1, bp};
      } else {
        subs[q] = {c, -1, 1, 1};
        subs.push_back({d, -1, 1, 1});
      }
      pos = pos.normalized();
      return true;
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(Flag flag) {
  switch (flag) {
    case Flag::TiesNotStrict: return "ties_not_strict";
    case Flag::NonIsolated: return "non_isolated";
    case Flag::BoundaryCase: return "boundary_case";
    case Flag::OrientationReversed: return "orientation_reversed";
  }
  return "unknown";
}

std::string_view to_string(SchemeStepKind kind) {
  switch (kind) {
    case SchemeStepKind::SignFlip: return "sign-flip";
    case SchemeStepKind::Disentangle: return "disentangle";
    case SchemeStepKind::Shift: return "shift";
    case SchemeStepKind::Exhaust: return "exhaust";
  }
  return "unknown";
}

bool MinimizerSet::has(Flag f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

int optimal_k(const DiagParams& d) { return count_leading_pairs(d.sorted()); }

double reduced_energy(const DiagParams& d) {
  const auto ds = d.sorted();
  const int k = count_leading_pairs(ds);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double t = ds[static_cast<std::size_t>(2 * i)] - ds[static_cast<std::size_t>(2 * i + 1)];
    total += 0.5 * t * t;
  }
  for (std::size_t i = static_cast<std::size_t>(2 * k); i < ds.size(); ++i) {
    total += (ds[i] - 1.0) * (ds[i] - 1.0);
  }
  return total;
}

MinimizerSet rpolar_diag(const DiagParams& d) {
  const auto ds = d.sorted();
  MinimizerSet out;
  out.k = count_leading_pairs(ds);
  out.reduced_energy = reduced_energy(d);
  for (int i = 0; i < out.k; ++i) {
    out.cos_alphas.push_back(2.0 / (ds[static_cast<std::size_t>(2 * i)] +
                                    ds[static_cast<std::size_t>(2 * i + 1)]));
  }
  out.label = relabel(leading_pairs_label(d.dim(), out.k), d.perm());
  for (auto& cp : realize(out.label, d)) out.rotations.push_back(std::move(cp.rotation));

  if (!d.strict()) {
    out.flags.push_back(Flag::TiesNotStrict);
    if (out.k > 0) out.flags.push_back(Flag::NonIsolated);
  }
  if (near_boundary(ds, out.k)) out.flags.push_back(Flag::BoundaryCase);
  return out;
}

MinimizerSet rpolar_full(const Mat& f) {
  const PolarFactors pf = polar_decompose(f);
  const DiagParams d(std::vector<double>(pf.singular_values.data(),
                                         pf.singular_values.data() + pf.singular_values.size()));
  MinimizerSet rel = rpolar_diag(d);
  // R̄ᵀF = W R Σ Wᵀ for R̄ = Q W Rᵀ Wᵀ, so the absolute energy equals the
  // relative one. The relative minimizer set is closed under transposition.
  const Mat qw = pf.rot.matrix() * pf.right_basis;
  const Mat& w = pf.right_basis;
  MinimizerSet out = rel;
  out.rotations.clear();
  for (const auto& r : rel.rotations) {
    out.rotations.emplace_back(qw * r.matrix().transpose() * w.transpose());
  }
  if (!d.strict() && !out.has(Flag::NonIsolated)) out.flags.push_back(Flag::NonIsolated);
  return out;
}

Rotation rpolar_classical(const Mat& f, double mu, double mu_c) {
  if (!(mu > 0.0) || !(mu_c >= 0.0) || !std::isfinite(mu) || !std::isfinite(mu_c)) {
    throw Error(ErrorCode::InvalidWeights, "rpolar_classical: need mu > 0 and mu_c >= 0");
  }
  if (mu_c < mu) {
    throw Error(ErrorCode::NonClassicalRange,
                "rpolar_classical: mu_c < mu is outside the classical range");
  }
  return polar_decompose(f).rot;
}

bool same_partition(const PartitionLabel& a, const PartitionLabel& b) {
  auto strip = [](const PartitionLabel& l) {
    PartitionLabel n = l.normalized();
    for (auto& s : n.subsets) s.angle_sign = 1;
    return n;
  };
  return strip(a).subsets == strip(b).subsets;
}

SchemeTrace scheme_minimize(const PartitionLabel& start, const DiagParams& d) {
  validate_structure(start, d);
  for (const auto& s : start.subsets) {
    if (s.is_pair() && !pair_feasible(d[s.first], d[s.second], 1)) {
      throw Error(ErrorCode::InfeasibleLabel,
                  "scheme: pair {" + std::to_string(s.first + 1) + "," +
                      std::to_string(s.second + 1) + "} needs d_i + d_j > 2");
    }
  }
  const auto ds = d.sorted();
  const auto& perm = d.perm();
  const auto inv = inverse(perm);
  const int n = d.dim();

  SchemeTrace trace;
  try {
    validate_label(start, d, /*require_rotation=*/true);
  } catch (const Error&) {
    trace.start_is_critical = false;
  }
  PartitionLabel pos = relabel(start, inv);
  auto record = [&](SchemeStepKind kind, const PartitionLabel& next) {
    PartitionLabel before = relabel(pos, perm);
    PartitionLabel after = relabel(next, perm);
    const double vb = trace.steps.empty() ? formal_value(before, d) : critical_value(before, d);
    const double va = critical_value(after, d);
    trace.steps.push_back({kind, std::move(before), std::move(after), vb, va});
    pos = next;
  };

  // 1. Positive determinant everywhere. |d_i − d_j| > 2 implies d_i + d_j > 2,
  //    so every pair stays feasible; flipping all at once keeps the parity +1.
  PartitionLabel flipped = pos;
  for (auto& s : flipped.subsets) s.det_sign = 1;
  record(SchemeStepKind::SignFlip, flipped);

  // 2. Remove nested pairs.
  PartitionLabel untangled = pos;
  while (disentangle_once(untangled, ds)) {
  }
  record(SchemeStepKind::Disentangle, untangled);

  // 3. Move the pairs to the leading indices. At most k of them fit.
  const int k = count_leading_pairs(ds);
  const int shifted_pairs = std::min(pos.pair_count(), k);
  PartitionLabel shifted = leading_pairs_label(n, shifted_pairs);
  {
    // Keep angle signs of surviving pairs in their original order.
    std::vector<int> angles;
    for (const auto& s : pos.subsets)
      if (s.is_pair()) angles.push_back(s.angle_sign);
    int a = 0;
    for (auto& s : shifted.subsets) {
      if (s.is_pair() && a < static_cast<int>(angles.size())) s.angle_sign = angles[static_cast<std::size_t>(a++)];
    }
  }
  if (same_partition(shifted, pos)) shifted = pos;
  record(SchemeStepKind::Shift, shifted);

  // 4. Join adjacent singletons while the pair stays feasible.
  PartitionLabel exhausted = leading_pairs_label(n, k);
  for (std::size_t s = 0; s < exhausted.subsets.size() && s < pos.subsets.size(); ++s) {
    if (exhausted.subsets[s].is_pair() && pos.subsets[s].is_pair()) {
      exhausted.subsets[s].angle_sign = pos.subsets[s].angle_sign;
    }
  }
  if (same_partition(exhausted, pos)) exhausted = pos;
  record(SchemeStepKind::Exhaust, exhausted);

  return trace;
}

Reflection reflect_negative(const std::vector<double>& d_signed) {
  if (d_signed.empty()) throw Error(ErrorCode::DegenerateD, "reflect_negative: empty D");
  double top = 0.0;
  for (double v : d_signed) {
    if (!std::isfinite(v)) throw Error(ErrorCode::DegenerateD, "reflect_negative: non-finite entry");
    top = std::max(top, std::abs(v));
  }
  const double eps = tie_rel * top;
  for (std::size_t i = 0; i < d_signed.size(); ++i) {
    if (std::abs(d_signed[i]) <= eps) {
      throw Error(ErrorCode::DegenerateD,
                  "reflect_negative: d_" + std::to_string(i + 1) + " vanishes");
    }
    for (std::size_t j = i + 1; j < d_signed.size(); ++j) {
      if (std::abs(d_signed[i] + d_signed[j]) <= eps) {
        throw Error(ErrorCode::DegenerateD, "reflect_negative: d_" + std::to_string(i + 1) +
                                                " + d_" + std::to_string(j + 1) + " vanishes");
      }
    }
  }
  std::vector<double> abs_d;
  std::vector<int> signs;
  int det = 1;
  for (double v : d_signed) {
    abs_d.push_back(std::abs(v));
    signs.push_back(v < 0.0 ? -1 : 1);
    det *= signs.back();
  }
  return Reflection{DiagParams(std::move(abs_d)), std::move(signs), det};
}

MinimizerSet rpolar_signed(const std::vector<double>& d_signed) {
  const Reflection refl = reflect_negative(d_signed);
  MinimizerSet base = rpolar_diag(refl.abs_d);
  if (refl.orientation_reversed()) {
    base.rotations.clear();
    base.reduced_energy = std::numeric_limits<double>::quiet_NaN();
    base.flags.push_back(Flag::OrientationReversed);
    return base;
  }
  // R D = (R J)(J D) with J² = 1, so R = R' J for minimizers R' of |D|.
  for (auto& r : base.rotations) {
    Mat m = r.matrix();
    for (std::size_t j = 0; j < refl.signs.size(); ++j) m.col(static_cast<Eigen::Index>(j)) *= refl.signs[j];
    r = Rotation(std::move(m));
  }
  return base;
}

}  // namespace rpolar
