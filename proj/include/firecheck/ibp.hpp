// Interval bound propagation: sound logit enclosures over input boxes.
#pragma once

#include <algorithm>
#include <vector>

#include "firecheck/eval.hpp"
#include "firecheck/interval.hpp"
#include "firecheck/propagate.hpp"

namespace firecheck {

namespace detail {

struct IntervalOps {
  using Value = Interval;

  // Accumulates term by term in the same order as plain evaluation, rounding
  // each product and running sum outward; see interval.hpp for why this also
  // encloses nearest-rounded eval results.
  Value affine(const std::vector<AffineTerm<Value>>& terms, double bias) const {
    double lo = bias, hi = bias;
    for (const auto& t : terms) {
      const Interval p = scale(t.coeff, *t.value);
      lo = add_down(lo, p.lo);
      hi = add_up(hi, p.hi);
    }
    return {lo, hi};
  }

  Value relu(const Value& v) const { return {std::max(0.0, v.lo), std::max(0.0, v.hi)}; }

  Value max(const std::vector<const Value*>& items) const {
    double lo = items[0]->lo, hi = items[0]->hi;
    for (std::size_t i = 1; i < items.size(); ++i) {
      lo = std::max(lo, items[i]->lo);
      hi = std::max(hi, items[i]->hi);
    }
    return {lo, hi};
  }
};

inline void require_box_shape(const Network& net, const Box& box) {
  if (box.shape() != net.input_shape) {
    throw std::invalid_argument("box shape " + shape_str(box.shape()) +
                                " does not match expected " + shape_str(net.input_shape));
  }
}

}  // namespace detail

// Sound enclosure of the logit over every input in the box.
inline Interval ibp_bounds(const Network& net, const Box& box) {
  const auto vr = validate(net);
  require_valid(net, vr);
  detail::require_box_shape(net, box);
  return propagate_logit(net, vr.output_shapes, box.dims(), detail::IntervalOps{});
}

// Same walk, but records the interval vector after every propagated layer
// (useful for inspecting where bounds loosen, and for refinement tests).
inline std::vector<std::vector<Interval>> ibp_trace(const Network& net, const Box& box) {
  const auto vr = validate(net);
  require_valid(net, vr);
  detail::require_box_shape(net, box);
  std::vector<std::vector<Interval>> stages;
  propagate_logit_observed(net, vr.output_shapes, box.dims(), detail::IntervalOps{},
                           [&stages](std::size_t, const std::vector<Interval>& values) {
                             stages.push_back(values);
                           });
  return stages;
}

}  // namespace firecheck
