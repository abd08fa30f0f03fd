// Closed intervals with outward-rounded arithmetic, and boxes over tensors.
//
// Soundness convention: every arithmetic step that can round (products and
// running sums in affine combinations) is pushed one floating-point step
// outward with nextafter. One step past round-to-nearest strictly covers the
// at-most-half-step error of any nearest-rounded evaluation of the same
// expression, so enclosures computed here contain not only the real-valued
// results but also everything plain eval can produce over the same inputs.
// ReLU and max only select among existing bounds and stay exact.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "firecheck/tensor.hpp"

namespace firecheck {

namespace detail {

inline double round_down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double round_up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

// Directed-rounded primitives that keep exactly representable results exact.
// A nearest-rounded sum that lands on zero is exact (two doubles whose sum is
// nonzero differ by at least one subnormal step), and a product is exactly
// zero only when an operand is zero; skipping the outward step in those cases
// lets enclosures of identically-zero quantities stay at zero instead of
// leaking into +/-denormals, which certificates comparing against 0 rely on.
inline double add_down(double a, double b) {
  if (a == 0.0) return b;
  if (b == 0.0) return a;
  const double s = a + b;
  return s == 0.0 ? 0.0 : round_down(s);
}
inline double add_up(double a, double b) {
  if (a == 0.0) return b;
  if (b == 0.0) return a;
  const double s = a + b;
  return s == 0.0 ? 0.0 : round_up(s);
}
inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }
inline double mul_down(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  return round_down(p);  // p == 0 here means underflow, and the step below covers it
}
inline double mul_up(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  return round_up(p);
}

}  // namespace detail

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo <= hi)) throw std::invalid_argument("interval bounds out of order");
  }

  static Interval point(double v) { return Interval(v, v); }

  double width() const { return hi - lo; }
  double mid() const { return lo + 0.5 * (hi - lo); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  bool is_point() const { return lo == hi; }

  bool operator==(const Interval& other) const { return lo == other.lo && hi == other.hi; }
};

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
  if (lo > hi) return std::nullopt;
  return Interval(lo, hi);
}

// Outward-rounded scalar * interval.
inline Interval scale(double c, const Interval& v) {
  if (c >= 0.0) return {detail::mul_down(c, v.lo), detail::mul_up(c, v.hi)};
  return {detail::mul_down(c, v.hi), detail::mul_up(c, v.lo)};
}

// Outward-rounded sum and difference.
inline Interval add(const Interval& a, const Interval& b) {
  return {detail::add_down(a.lo, b.lo), detail::add_up(a.hi, b.hi)};
}
inline Interval sub(const Interval& a, const Interval& b) {
  return {detail::sub_down(a.lo, b.hi), detail::sub_up(a.hi, b.lo)};
}

// Outward-rounded product of two intervals (used for the eps * signal term).
inline Interval mul(const Interval& a, const Interval& b) {
  const double lo = std::min(std::min(detail::mul_down(a.lo, b.lo), detail::mul_down(a.lo, b.hi)),
                             std::min(detail::mul_down(a.hi, b.lo), detail::mul_down(a.hi, b.hi)));
  const double hi = std::max(std::max(detail::mul_up(a.lo, b.lo), detail::mul_up(a.lo, b.hi)),
                             std::max(detail::mul_up(a.hi, b.lo), detail::mul_up(a.hi, b.hi)));
  return {lo, hi};
}

// Per-dimension closed intervals over a tensor shape.
class Box {
 public:
  Box(Shape shape, std::vector<Interval> dims) : shape_(std::move(shape)), dims_(std::move(dims)) {
    const auto n = shape_size(shape_);
    if (n <= 0) throw std::invalid_argument("box shape must have positive volume");
    if (static_cast<std::int64_t>(dims_.size()) != n)
      throw std::invalid_argument("box has " + std::to_string(dims_.size()) +
                                  " intervals but shape " + shape_str(shape_) + " needs " +
                                  std::to_string(n));
    for (const auto& d : dims_) {
      if (!std::isfinite(d.lo) || !std::isfinite(d.hi))
        throw std::invalid_argument("box bounds must be finite");
    }
  }

  // Uniform bounds in every dimension.
  Box(Shape shape, double lo, double hi)
      : Box(std::move(shape), std::vector<Interval>(
                                  static_cast<std::size_t>(std::max<std::int64_t>(
                                      shape_size(shape), 0)),
                                  Interval(lo, hi))) {}

  static Box point(const Tensor& t) {
    std::vector<Interval> dims;
    dims.reserve(t.data().size());
    for (double v : t.data()) dims.push_back(Interval::point(v));
    return Box(t.shape(), std::move(dims));
  }

  const Shape& shape() const { return shape_; }
  const std::vector<Interval>& dims() const { return dims_; }
  std::size_t size() const { return dims_.size(); }
  const Interval& operator[](std::size_t i) const { return dims_[i]; }

  bool is_point() const {
    for (const auto& d : dims_)
      if (!d.is_point()) return false;
    return true;
  }

  bool contains(const Tensor& t) const {
    if (t.shape() != shape_) return false;
    for (std::size_t i = 0; i < dims_.size(); ++i)
      if (!dims_[i].contains(t.data()[i])) return false;
    return true;
  }

  Tensor lower() const {
    std::vector<double> v(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) v[i] = dims_[i].lo;
    return Tensor(shape_, std::move(v));
  }

  Tensor upper() const {
    std::vector<double> v(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) v[i] = dims_[i].hi;
    return Tensor(shape_, std::move(v));
  }

  Tensor midpoint() const {
    std::vector<double> v(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) v[i] = dims_[i].mid();
    return Tensor(shape_, std::move(v));
  }

  // Clamp a tensor's entries into the box, dimension by dimension.
  Tensor clamp(const Tensor& t) const {
    std::vector<double> v = t.data();
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = std::min(std::max(v[i], dims_[i].lo), dims_[i].hi);
    return Tensor(shape_, std::move(v));
  }

  bool operator==(const Box& other) const { return shape_ == other.shape_ && dims_ == other.dims_; }

 private:
  Shape shape_;
  std::vector<Interval> dims_;
};

}  // namespace firecheck
