// Exact forward inference.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "firecheck/propagate.hpp"

namespace firecheck {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct EvalOps {
  using Value = double;

  Value affine(const std::vector<AffineTerm<Value>>& terms, double bias) const {
    double acc = bias;
    for (const auto& t : terms) acc += t.coeff * *t.value;
    return acc;
  }
  Value relu(const Value& v) const { return v > 0.0 ? v : 0.0; }
  Value max(const std::vector<const Value*>& items) const {
    double m = *items[0];
    for (std::size_t i = 1; i < items.size(); ++i) m = std::max(m, *items[i]);
    return m;
  }
};

struct EvalResult {
  double logit = 0.0;
  double score = 0.0;       // sigmoid(logit) when the net has a sigmoid head, else the logit
  bool sigmoid_head = false;
};

inline void require_valid(const Network& net, const ValidationResult& vr) {
  if (!vr.ok()) throw std::invalid_argument("invalid network '" + net.name + "': " + vr.message());
}

inline void require_input_shape(const Network& net, const Tensor& input) {
  if (input.shape() != net.input_shape) {
    throw std::invalid_argument("input shape " + shape_str(input.shape()) + " does not match expected " +
                                shape_str(net.input_shape));
  }
}

inline EvalResult eval(const Network& net, const Tensor& input) {
  const auto vr = validate(net);
  require_valid(net, vr);
  require_input_shape(net, input);
  const double logit = propagate_logit(net, vr.output_shapes, input.data(), EvalOps{});
  EvalResult r;
  r.logit = logit;
  r.sigmoid_head = has_sigmoid_head(net);
  r.score = r.sigmoid_head ? sigmoid(logit) : logit;
  return r;
}

inline double eval_logit(const Network& net, const Tensor& input) { return eval(net, input).logit; }

enum class Classification { Fire, NoFire };

struct ClassifyResult {
  Classification label = Classification::NoFire;
  double score = 0.0;
  double logit = 0.0;
};

// Fire iff score strictly exceeds delta; ties classify as NoFire.
inline ClassifyResult classify(const Network& net, const Tensor& input, double delta) {
  if (!std::isfinite(delta)) throw std::invalid_argument("classification threshold must be finite");
  const auto r = eval(net, input);
  return {r.score > delta ? Classification::Fire : Classification::NoFire, r.score, r.logit};
}

}  // namespace firecheck
