// Exact local-consistency decisions along planting rays.
//
// Restricted to the ray x(eps) = background + eps * signal, every neuron of a
// dense/conv/relu/maxpool network is an exact piecewise-linear function of the
// single scalar eps, so the logit g(eps) can be propagated symbolically and
// its monotonicity decided without sampling. A scene is consistent when no
// segment of g decreases: growing the signal never lowers the score.
//
// Witnesses found on g are re-confirmed through plain eval before being
// reported, so an Inconsistent verdict is always backed by two concrete
// forward passes.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "firecheck/eval.hpp"
#include "firecheck/planting.hpp"
#include "firecheck/pwl.hpp"

namespace firecheck {

struct PropagateOptions {
  double merge_rel = kPwlMergeRel;         // breakpoint-merge tolerance, relative to domain width
  std::int64_t segment_cap = 1'000'000;    // hard failure above this many breakpoints
  double slope_tolerance = 0.0;            // a segment counts as decreasing iff slope < -this
};

// Hard stop for runaway breakpoint growth: exactness over silent approximation.
class SegmentCapError : public std::runtime_error {
 public:
  SegmentCapError(std::int64_t count, std::int64_t cap)
      : std::runtime_error("piecewise-linear propagation produced " + std::to_string(count) +
                           " breakpoints, exceeding the cap of " + std::to_string(cap)),
        count_(count),
        cap_(cap) {}
  std::int64_t count() const { return count_; }
  std::int64_t cap() const { return cap_; }

 private:
  std::int64_t count_;
  std::int64_t cap_;
};

namespace detail {

struct PwlOps {
  using Value = PwlFunction;

  double domain_lo = 0.0;
  double domain_hi = 0.0;
  PropagateOptions options;

  Value checked(Value f) const {
    if (f.breakpoint_count() > options.segment_cap)
      throw SegmentCapError(f.breakpoint_count(), options.segment_cap);
    return f;
  }

  Value affine(const std::vector<AffineTerm<Value>>& terms, double bias) const {
    if (terms.empty()) return PwlFunction::constant(domain_lo, domain_hi, bias);
    std::vector<double> coeffs;
    std::vector<const Value*> fs;
    coeffs.reserve(terms.size());
    fs.reserve(terms.size());
    for (const auto& t : terms) {
      coeffs.push_back(t.coeff);
      fs.push_back(t.value);
    }
    return checked(pwl_affine(coeffs, fs, bias, options.merge_rel));
  }

  Value relu(const Value& f) const { return checked(pwl_relu(f, options.merge_rel)); }

  Value max(const std::vector<const Value*>& items) const {
    return checked(pwl_max(items, options.merge_rel));
  }
};

}  // namespace detail

// Propagates the logit along the planting ray of `scene` as an explicit
// piecewise-linear function of eps. Exact up to floating rounding; a trailing
// sigmoid head is not applied (it is strictly increasing, so monotonicity
// questions are unaffected).
inline PwlFunction propagate_ray(const Network& net, const Scene& scene,
                                 const PropagateOptions& options = {}) {
  const auto vr = validate(net);
  require_valid(net, vr);
  require_input_shape(net, scene.signal);

  const double lo = scene.eps_range.lo, hi = scene.eps_range.hi;
  const auto& s = scene.signal.data();
  const auto& b = scene.background.data();

  std::vector<PwlFunction> inputs;
  inputs.reserve(s.size());
  for (std::size_t j = 0; j < s.size(); ++j)
    inputs.push_back(PwlFunction::from_endpoints(lo, hi, b[j] + lo * s[j], b[j] + hi * s[j]));

  detail::PwlOps ops;
  ops.domain_lo = lo;
  ops.domain_hi = hi;
  ops.options = options;
  return propagate_logit(net, vr.output_shapes, std::move(inputs), ops);
}

enum class ConsistencyStatus { Consistent, Inconsistent };

struct ConsistencyVerdict {
  ConsistencyStatus status = ConsistencyStatus::Consistent;
  std::int64_t segments = 0;  // segment count of the propagated logit
  // Set only when Inconsistent: eps1 > eps2 but value1 < value2, both values
  // re-confirmed through eval, so margin = value2 - value1 > 0.
  double eps1 = 0.0;
  double eps2 = 0.0;
  double value1 = 0.0;
  double value2 = 0.0;
  double margin = 0.0;

  bool consistent() const { return status == ConsistencyStatus::Consistent; }
};

inline nlohmann::json consistency_verdict_to_json(const ConsistencyVerdict& v) {
  nlohmann::json j;
  j["status"] = v.consistent() ? "consistent" : "inconsistent";
  j["segments"] = v.segments;
  if (!v.consistent()) {
    j["eps1"] = v.eps1;
    j["eps2"] = v.eps2;
    j["value1"] = v.value1;
    j["value2"] = v.value2;
    j["margin"] = v.margin;
  }
  return j;
}

// Decides whether the logit is monotone nondecreasing along the scene's ray.
//
// Candidate witnesses are maximal runs of decreasing segments (largest total
// drop first, so the reported margin is as informative as possible); each is
// confirmed by two independent forward evaluations before it is believed.
// A candidate whose drop cannot be reproduced by eval is floating noise of
// the symbolic pipeline, not of the network, and is discarded.
inline ConsistencyVerdict verify_local_consistency(const Network& net, const Scene& scene,
                                                   const PropagateOptions& options = {}) {
  const PwlFunction g = propagate_ray(net, scene, options);
  const auto& xs = g.breakpoints();
  const auto& ys = g.values();

  ConsistencyVerdict verdict;
  verdict.segments = g.segment_count();

  struct Run {
    double eps2, eps1, drop;
  };
  std::vector<Run> runs;
  std::size_t i = 0;
  const std::size_t n_seg = xs.size() - 1;
  while (i < n_seg) {
    const double slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    if (slope < -options.slope_tolerance) {
      std::size_t j = i;
      while (j + 1 < n_seg &&
             (ys[j + 2] - ys[j + 1]) / (xs[j + 2] - xs[j + 1]) < -options.slope_tolerance)
        ++j;
      runs.push_back({xs[i], xs[j + 1], ys[i] - ys[j + 1]});
      i = j + 1;
    } else {
      ++i;
    }
  }
  if (runs.empty()) return verdict;

  std::stable_sort(runs.begin(), runs.end(),
                   [](const Run& a, const Run& b) { return a.drop > b.drop; });
  for (const auto& run : runs) {
    const double v2 = eval_logit(net, plant(scene.signal, scene.background, run.eps2));
    const double v1 = eval_logit(net, plant(scene.signal, scene.background, run.eps1));
    if (v1 < v2) {
      verdict.status = ConsistencyStatus::Inconsistent;
      verdict.eps1 = run.eps1;
      verdict.eps2 = run.eps2;
      verdict.value1 = v1;
      verdict.value2 = v2;
      verdict.margin = v2 - v1;
      return verdict;
    }
  }
  return verdict;  // no candidate survived re-evaluation
}

}  // namespace firecheck
