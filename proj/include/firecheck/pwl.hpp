// Exact piecewise-linear functions of one scalar over a closed interval.
//
// A PwlFunction stores strictly increasing breakpoints spanning its domain
// and one value per breakpoint; segments interpolate linearly, so the
// function is continuous by construction. The three operations below (affine
// combination, relu, pointwise max) are closed over this family and exact up
// to floating rounding: new breakpoints are inserted wherever a relu crosses
// zero or two segments intersect.
//
// Breakpoints closer than merge_rel * domain_width are collapsed to keep
// numerically spurious zero-length segments out of the representation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace firecheck {

inline constexpr double kPwlMergeRel = 1e-12;

class PwlFunction {
 public:
  PwlFunction(std::vector<double> breakpoints, std::vector<double> values)
      : xs_(std::move(breakpoints)), ys_(std::move(values)) {
    if (xs_.empty() || xs_.size() != ys_.size())
      throw std::invalid_argument("pwl: breakpoint and value lists must be non-empty and equal-sized");
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i]))
        throw std::invalid_argument("pwl: breakpoints and values must be finite");
      if (i > 0 && !(xs_[i] > xs_[i - 1]))
        throw std::invalid_argument("pwl: breakpoints must be strictly increasing");
    }
  }

  static PwlFunction constant(double lo, double hi, double value) {
    if (lo == hi) return PwlFunction({lo}, {value});
    return PwlFunction({lo, hi}, {value, value});
  }

  // The line through (lo, y_lo) and (hi, y_hi).
  static PwlFunction from_endpoints(double lo, double hi, double y_lo, double y_hi) {
    if (lo == hi) return PwlFunction({lo}, {y_lo});
    return PwlFunction({lo, hi}, {y_lo, y_hi});
  }

  double domain_lo() const { return xs_.front(); }
  double domain_hi() const { return xs_.back(); }
  const std::vector<double>& breakpoints() const { return xs_; }
  const std::vector<double>& values() const { return ys_; }
  std::int64_t breakpoint_count() const { return static_cast<std::int64_t>(xs_.size()); }
  std::int64_t segment_count() const { return static_cast<std::int64_t>(xs_.size()) - 1; }

  bool same_domain(const PwlFunction& other) const {
    return domain_lo() == other.domain_lo() && domain_hi() == other.domain_hi();
  }

  // Clamped evaluation; exact at breakpoints.
  double operator()(double t) const {
    if (t <= xs_.front()) return ys_.front();
    if (t >= xs_.back()) return ys_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
    const std::size_t lo = hi - 1;
    if (xs_[lo] == t) return ys_[lo];
    const double theta = (t - xs_[lo]) / (xs_[hi] - xs_[lo]);
    return ys_[lo] + (ys_[hi] - ys_[lo]) * theta;
  }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

namespace detail {

// Forward walk over sorted query points; exact at this function's breakpoints.
class SortedEval {
 public:
  explicit SortedEval(const PwlFunction& f) : f_(f) {}

  double at(double t) {
    const auto& xs = f_.breakpoints();
    const auto& ys = f_.values();
    while (seg_ + 1 < xs.size() && xs[seg_ + 1] <= t) ++seg_;
    if (xs[seg_] == t || seg_ + 1 == xs.size()) return ys[seg_];
    const double theta = (t - xs[seg_]) / (xs[seg_ + 1] - xs[seg_]);
    return ys[seg_] + (ys[seg_ + 1] - ys[seg_]) * theta;
  }

 private:
  const PwlFunction& f_;
  std::size_t seg_ = 0;
};

inline double pwl_merge_tol(double lo, double hi, double merge_rel) { return merge_rel * (hi - lo); }

// Sorted union of all breakpoints, deduplicated within tol. Domain endpoints
// survive exactly: a kept interior point too close to the right endpoint is
// replaced by it.
inline std::vector<double> merge_breakpoints(const std::vector<const PwlFunction*>& fs, double tol) {
  std::vector<double> all;
  for (const auto* f : fs) all.insert(all.end(), f->breakpoints().begin(), f->breakpoints().end());
  std::sort(all.begin(), all.end());
  const double lo = all.front(), hi = all.back();
  std::vector<double> out{lo};
  for (double x : all) {
    if (x - out.back() > tol) out.push_back(x);
  }
  if (out.back() != hi) {
    if (out.size() > 1 && hi - out.back() <= tol)
      out.back() = hi;
    else
      out.push_back(hi);
  }
  return out;
}

}  // namespace detail

// Exact affine combination sum_i coeffs[i] * fs[i] + bias on the merged grid.
inline PwlFunction pwl_affine(const std::vector<double>& coeffs,
                              const std::vector<const PwlFunction*>& fs, double bias,
                              double merge_rel = kPwlMergeRel) {
  if (fs.empty() || coeffs.size() != fs.size())
    throw std::invalid_argument("pwl_affine: need matching, non-empty coefficient and function lists");
  for (const auto* f : fs) {
    if (!f->same_domain(*fs[0])) throw std::invalid_argument("pwl_affine: domain mismatch");
  }
  const double tol = detail::pwl_merge_tol(fs[0]->domain_lo(), fs[0]->domain_hi(), merge_rel);
  auto grid = detail::merge_breakpoints(fs, tol);

  std::vector<double> values(grid.size(), bias);
  for (std::size_t k = 0; k < fs.size(); ++k) {
    detail::SortedEval ev(*fs[k]);
    const double c = coeffs[k];
    for (std::size_t j = 0; j < grid.size(); ++j) values[j] += c * ev.at(grid[j]);
  }
  return PwlFunction(std::move(grid), std::move(values));
}

// Exact pointwise max(0, f); inserts each zero crossing as a breakpoint.
inline PwlFunction pwl_relu(const PwlFunction& f, double merge_rel = kPwlMergeRel) {
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  const double tol = detail::pwl_merge_tol(f.domain_lo(), f.domain_hi(), merge_rel);

  std::vector<double> out_x{xs[0]};
  std::vector<double> out_y{std::max(0.0, ys[0])};
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double y0 = ys[i], y1 = ys[i + 1];
    if ((y0 < 0.0 && y1 > 0.0) || (y0 > 0.0 && y1 < 0.0)) {
      const double t = xs[i] + (0.0 - y0) * (xs[i + 1] - xs[i]) / (y1 - y0);
      if (t - out_x.back() > tol && xs[i + 1] - t > tol) {
        out_x.push_back(t);
        out_y.push_back(0.0);
      }
    }
    out_x.push_back(xs[i + 1]);
    out_y.push_back(std::max(0.0, y1));
  }
  return PwlFunction(std::move(out_x), std::move(out_y));
}

namespace detail {

// Upper envelope of two functions on a shared domain.
inline PwlFunction pwl_max2(const PwlFunction& f, const PwlFunction& g, double merge_rel) {
  const double tol = pwl_merge_tol(f.domain_lo(), f.domain_hi(), merge_rel);
  const auto grid = merge_breakpoints({&f, &g}, tol);

  std::vector<double> fv(grid.size()), gv(grid.size());
  {
    SortedEval ef(f), eg(g);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      fv[j] = ef.at(grid[j]);
      gv[j] = eg.at(grid[j]);
    }
  }

  std::vector<double> out_x{grid[0]};
  std::vector<double> out_y{std::max(fv[0], gv[0])};
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double d0 = fv[j] - gv[j], d1 = fv[j + 1] - gv[j + 1];
    if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
      const double t = grid[j] + (0.0 - d0) * (grid[j + 1] - grid[j]) / (d1 - d0);
      if (t - out_x.back() > tol && grid[j + 1] - t > tol) {
        const double theta = (t - grid[j]) / (grid[j + 1] - grid[j]);
        out_x.push_back(t);
        out_y.push_back(fv[j] + (fv[j + 1] - fv[j]) * theta);  // f == g here
      }
    }
    out_x.push_back(grid[j + 1]);
    out_y.push_back(std::max(fv[j + 1], gv[j + 1]));
  }
  return PwlFunction(std::move(out_x), std::move(out_y));
}

}  // namespace detail

// Exact pointwise maximum (upper envelope) of a non-empty list.
inline PwlFunction pwl_max(const std::vector<const PwlFunction*>& fs,
                           double merge_rel = kPwlMergeRel) {
  if (fs.empty()) throw std::invalid_argument("pwl_max: empty list");
  for (const auto* f : fs) {
    if (!f->same_domain(*fs[0])) throw std::invalid_argument("pwl_max: domain mismatch");
  }
  PwlFunction acc = *fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = detail::pwl_max2(acc, *fs[i], merge_rel);
  return acc;
}

}  // namespace firecheck
