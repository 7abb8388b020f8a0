#include "rpolar/critical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rpolar {

namespace {

[[noreturn]] void infeasible(const std::string& msg) {
  throw Error(ErrorCode::InfeasibleLabel, msg);
}

double pair_cosine(double di, double dj, int det_sign) {
  return det_sign > 0 ? 2.0 / (di + dj) : 2.0 / (di - dj);
}

// Labels of every angle-sign combination on the pairs of `base`.
std::vector<PartitionLabel> angle_variants(const PartitionLabel& base) {
  std::vector<std::size_t> pair_pos;
  for (std::size_t s = 0; s < base.subsets.size(); ++s) {
    if (base.subsets[s].is_pair()) pair_pos.push_back(s);
  }
  std::vector<PartitionLabel> out;
  const std::size_t count = std::size_t{1} << pair_pos.size();
  out.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    PartitionLabel v = base;
    for (std::size_t b = 0; b < pair_pos.size(); ++b) {
      // Most significant bit belongs to the first pair so that the
      // all-positive variant comes first.
      const bool negative = (mask >> (pair_pos.size() - 1 - b)) & 1U;
      v.subsets[pair_pos[b]].angle_sign = negative ? -1 : 1;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

bool exceeds_two(double x) { return x > 2.0 * (1.0 + boundary_rel); }

DiagParams::DiagParams(std::vector<double> d) : d_(std::move(d)) {
  if (d_.empty()) throw Error(ErrorCode::InvalidParams, "DiagParams: empty");
  for (double v : d_) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw Error(ErrorCode::InvalidParams,
                  "DiagParams: entries must be finite and positive, got " +
                      std::to_string(v));
    }
  }
  perm_.resize(d_.size());
  std::iota(perm_.begin(), perm_.end(), 0);
  std::stable_sort(perm_.begin(), perm_.end(), [this](int a, int b) {
    return d_[static_cast<std::size_t>(a)] > d_[static_cast<std::size_t>(b)];
  });
  const double top = d_[static_cast<std::size_t>(perm_.front())];
  for (std::size_t k = 1; k < perm_.size(); ++k) {
    const double gap = d_[static_cast<std::size_t>(perm_[k - 1])] -
                       d_[static_cast<std::size_t>(perm_[k])];
    if (gap <= tie_rel * top) strict_ = false;
  }
}

std::vector<double> DiagParams::sorted() const {
  std::vector<double> s;
  s.reserve(d_.size());
  for (int p : perm_) s.push_back(d_[static_cast<std::size_t>(p)]);
  return s;
}

Mat DiagParams::matrix() const {
  Mat m = Mat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) m(i, i) = (*this)[i];
  return m;
}

int PartitionLabel::det_parity() const {
  int p = 1;
  for (const auto& s : subsets) p *= s.det_sign;
  return p;
}

int PartitionLabel::pair_count() const {
  return static_cast<int>(std::count_if(subsets.begin(), subsets.end(),
                                        [](const SubsetLabel& s) { return s.is_pair(); }));
}

PartitionLabel PartitionLabel::normalized() const {
  PartitionLabel out = *this;
  for (auto& s : out.subsets) {
    if (s.is_pair() && s.second < s.first) std::swap(s.first, s.second);
    if (!s.is_pair()) s.angle_sign = 1;
  }
  std::sort(out.subsets.begin(), out.subsets.end(),
            [](const SubsetLabel& a, const SubsetLabel& b) { return a.first < b.first; });
  return out;
}

bool pair_feasible(double di, double dj, int det_sign) {
  return det_sign > 0 ? exceeds_two(di + dj) : exceeds_two(std::abs(di - dj));
}

void validate_structure(const PartitionLabel& label, const DiagParams& d) {
  const int n = d.dim();
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  auto mark = [&](int idx) {
    if (idx < 0 || idx >= n) {
      infeasible("label index " + std::to_string(idx + 1) + " outside 1.." +
                 std::to_string(n));
    }
    if (seen[static_cast<std::size_t>(idx)]++) {
      infeasible("label index " + std::to_string(idx + 1) + " used twice");
    }
  };
  for (const auto& s : label.subsets) {
    if (s.det_sign != 1 && s.det_sign != -1) infeasible("det sign must be +1 or -1");
    if (s.angle_sign != 1 && s.angle_sign != -1) infeasible("angle sign must be +1 or -1");
    mark(s.first);
    if (s.is_pair()) mark(s.second);
  }
  for (int i = 0; i < n; ++i) {
    if (!seen[static_cast<std::size_t>(i)]) {
      infeasible("label does not cover index " + std::to_string(i + 1));
    }
  }
}

void validate_label(const PartitionLabel& label, const DiagParams& d,
                    bool require_rotation) {
  validate_structure(label, d);
  for (const auto& s : label.subsets) {
    if (s.is_pair() && !pair_feasible(d[s.first], d[s.second], s.det_sign)) {
      infeasible("pair {" + std::to_string(s.first + 1) + "," +
                 std::to_string(s.second + 1) + "} with det " +
                 (s.det_sign > 0 ? "+1" : "-1") +
                 " violates its feasibility inequality");
    }
  }
  if (require_rotation && label.det_parity() != 1) {
    infeasible("determinant signs multiply to -1; the point is not in SO(n)");
  }
}

double energy(const Mat& r, const DiagParams& d) {
  if (r.rows() != d.dim() || r.cols() != d.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "energy: dimension mismatch");
  }
  const auto n = r.rows();
  Mat rd = r;
  for (Eigen::Index j = 0; j < n; ++j) rd.col(j) *= d[static_cast<int>(j)];
  rd -= Mat::Identity(n, n);
  return sym_part(rd).squaredNorm();
}

double energy(const Rotation& r, const DiagParams& d) { return energy(r.matrix(), d); }

double energy_weighted(const Rotation& r_bar, const Mat& f, double mu, double mu_c) {
  require_same_dim(r_bar.matrix(), f, "energy_weighted");
  require_finite(f, "energy_weighted");
  if (!(mu > 0.0) || !(mu_c >= 0.0) || !std::isfinite(mu) || !std::isfinite(mu_c)) {
    throw Error(ErrorCode::InvalidWeights, "energy_weighted: need mu > 0 and mu_c >= 0");
  }
  const Mat x = r_bar.matrix().transpose() * f - Mat::Identity(f.rows(), f.cols());
  return mu * sym_part(x).squaredNorm() + mu_c * skew_part(x).squaredNorm();
}

bool is_critical(const Rotation& r, const DiagParams& d, double tol) {
  if (r.dim() != d.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "is_critical: dimension mismatch");
  }
  const Mat dm = d.matrix();
  const Mat x = r.matrix() * dm - Mat::Identity(d.dim(), d.dim());
  return skew_part(x * x).norm() <= tol * (1.0 + dm.squaredNorm());
}

double critical_value(const PartitionLabel& label, const DiagParams& d) {
  validate_label(label, d, /*require_rotation=*/false);
  return formal_value(label, d);
}

double formal_value(const PartitionLabel& label, const DiagParams& d) {
  validate_structure(label, d);
  double total = 0.0;
  for (const auto& s : label.subsets) {
    const double di = d[s.first];
    if (!s.is_pair()) {
      const double t = s.det_sign > 0 ? di - 1.0 : di + 1.0;
      total += t * t;
    } else {
      const double dj = d[s.second];
      const double t = s.det_sign > 0 ? di - dj : di + dj;
      total += 0.5 * t * t;
    }
  }
  return total;
}

Mat realize_matrix(const PartitionLabel& label, const DiagParams& d) {
  validate_label(label, d, /*require_rotation=*/false);
  Mat r = Mat::Zero(d.dim(), d.dim());
  for (const auto& raw : label.subsets) {
    SubsetLabel s = raw;
    if (!s.is_pair()) {
      r(s.first, s.first) = s.det_sign;
      continue;
    }
    if (s.second < s.first) std::swap(s.first, s.second);
    const int i = s.first;
    const int j = s.second;
    const double c = pair_cosine(d[i], d[j], s.det_sign);
    const double sn = s.angle_sign * std::sqrt(std::max(0.0, 1.0 - c * c));
    if (s.det_sign > 0) {
      r(i, i) = c;
      r(i, j) = -sn;
      r(j, i) = sn;
      r(j, j) = c;
    } else {
      r(i, i) = c;
      r(i, j) = sn;
      r(j, i) = sn;
      r(j, j) = -c;
    }
  }
  return r;
}

std::vector<CriticalPoint> realize(const PartitionLabel& label, const DiagParams& d) {
  validate_label(label, d, /*require_rotation=*/true);
  const double value = critical_value(label, d);
  std::vector<CriticalPoint> out;
  for (auto& variant : angle_variants(label.normalized())) {
    Rotation r(realize_matrix(variant, d));
    out.push_back({std::move(variant), std::move(r), value});
  }
  return out;
}

namespace {

struct Enumerator {
  const DiagParams& d;
  const std::function<bool(const CriticalPoint&)>& visit;
  std::vector<int> assigned;
  PartitionLabel current;
  bool stopped = false;

  // Walks matchings of {0..n−1}: the smallest free index is either a
  // singleton or paired with a larger free index.
  void structures(int from) {
    if (stopped) return;
    const int n = d.dim();
    int i = from;
    while (i < n && assigned[static_cast<std::size_t>(i)]) ++i;
    if (i == n) {
      signs(0);
      return;
    }
    assigned[static_cast<std::size_t>(i)] = 1;
    current.subsets.push_back({i, -1, 1, 1});
    structures(i + 1);
    current.subsets.pop_back();
    for (int j = i + 1; j < n && !stopped; ++j) {
      if (assigned[static_cast<std::size_t>(j)]) continue;
      if (!pair_feasible(d[i], d[j], 1) && !pair_feasible(d[i], d[j], -1)) continue;
      assigned[static_cast<std::size_t>(j)] = 1;
      current.subsets.push_back({i, j, 1, 1});
      structures(i + 1);
      current.subsets.pop_back();
      assigned[static_cast<std::size_t>(j)] = 0;
    }
    assigned[static_cast<std::size_t>(i)] = 0;
  }

  void signs(std::size_t pos) {
    if (stopped) return;
    if (pos == current.subsets.size()) {
      if (current.det_parity() != 1) return;
      for (auto& cp : realize(current, d)) {
        if (!visit(cp)) {
          stopped = true;
          return;
        }
      }
      return;
    }
    auto& s = current.subsets[pos];
    for (int sign : {1, -1}) {
      if (s.is_pair() && !pair_feasible(d[s.first], d[s.second], sign)) continue;
      s.det_sign = sign;
      signs(pos + 1);
      if (stopped) return;
    }
    s.det_sign = 1;
  }
};

}  // namespace

void for_each_critical(const DiagParams& d,
                       const std::function<bool(const CriticalPoint&)>& visit,
                       int max_n) {
  if (d.dim() > max_n) {
    throw Error(ErrorCode::TooLarge, "enumerate_critical: n = " + std::to_string(d.dim()) +
                                         " exceeds max_n = " + std::to_string(max_n));
  }
  Enumerator e{d, visit, std::vector<int>(static_cast<std::size_t>(d.dim()), 0), {}, false};
  e.structures(0);
}

std::vector<CriticalPoint> enumerate_critical(const DiagParams& d, int max_n) {
  std::vector<CriticalPoint> out;
  for_each_critical(
      d,
      [&out](const CriticalPoint& cp) {
        out.push_back(cp);
        return true;
      },
      max_n);
  return out;
}

}  // namespace rpolar
