// Verification queries: a box precondition on the input plus linear
// postconditions on the scalar logit output y.
//
// By convention the postcondition encodes the NEGATION of the property one
// wants to hold, so Sat means "counterexample found" and Unsat means "the
// property holds".
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "firecheck/interval.hpp"
#include "firecheck/tensor.hpp"

namespace firecheck {

enum class CmpOp { Le, Ge, Lt, Gt };

inline const char* cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::Le: return "<=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Lt: return "<";
    default: return ">";
  }
}

// coeff * y <op> bound
struct PostConstraint {
  double coeff = 1.0;
  CmpOp op = CmpOp::Le;
  double bound = 0.0;

  bool strict() const { return op == CmpOp::Lt || op == CmpOp::Gt; }

  // Exact check on a concrete output; strict comparisons must clear an extra
  // margin (default 0) so near-boundary witnesses can be demanded to be robust.
  bool satisfied(double y, double strict_margin = 0.0) const {
    const double v = coeff * y;
    switch (op) {
      case CmpOp::Le: return v <= bound;
      case CmpOp::Ge: return v >= bound;
      case CmpOp::Lt: return v < bound - strict_margin;
      default: return v > bound + strict_margin;
    }
  }

  // How far a concrete output is from satisfying this constraint (<= 0 when
  // satisfied, treating strict as non-strict); used to steer witness search.
  double violation(double y) const {
    const double v = coeff * y;
    return (op == CmpOp::Le || op == CmpOp::Lt) ? v - bound : bound - v;
  }

  // The closed set of outputs y that can satisfy this constraint (strict
  // relaxed to non-strict, which is the sound direction for Unsat proofs).
  // Returns {lo, hi} possibly infinite at one end.
  std::pair<double, double> satisfying_y() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (coeff == 0.0) throw std::invalid_argument("post constraint has zero coefficient");
    const double edge = bound / coeff;
    const bool upper = (op == CmpOp::Le || op == CmpOp::Lt) == (coeff > 0.0);
    return upper ? std::pair{-inf, edge} : std::pair{edge, inf};
  }

  bool operator==(const PostConstraint& other) const {
    return coeff == other.coeff && op == other.op && bound == other.bound;
  }
};

// Precondition bounds are stored raw (one lo/hi pair per input dimension) so
// that contradictory constraints can be parsed and reported downstream; box()
// materializes them and rejects an empty precondition.
struct Query {
  Shape input_shape;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<PostConstraint> post;

  Query() = default;

  Query(Shape shape, std::vector<double> lo_, std::vector<double> hi_,
        std::vector<PostConstraint> post_)
      : input_shape(std::move(shape)), lo(std::move(lo_)), hi(std::move(hi_)), post(std::move(post_)) {
    const auto n = shape_size(input_shape);
    if (n <= 0) throw std::invalid_argument("query input shape must have positive volume");
    if (lo.size() != static_cast<std::size_t>(n) || hi.size() != lo.size())
      throw std::invalid_argument("query bound lists must have one entry per input dimension");
    if (post.empty()) throw std::invalid_argument("query needs at least one post constraint");
  }

  static Query from_box(const Box& box, std::vector<PostConstraint> post_) {
    std::vector<double> lo_(box.size()), hi_(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
      lo_[i] = box[i].lo;
      hi_[i] = box[i].hi;
    }
    return Query(box.shape(), std::move(lo_), std::move(hi_), std::move(post_));
  }

  bool feasible() const {
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!(lo[i] <= hi[i])) return false;
    }
    return true;
  }

  Box box() const {
    if (!feasible()) throw std::invalid_argument("infeasible precondition");
    std::vector<Interval> dims;
    dims.reserve(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) dims.emplace_back(lo[i], hi[i]);
    return Box(input_shape, std::move(dims));
  }

  bool operator==(const Query& other) const {
    return input_shape == other.input_shape && lo == other.lo && hi == other.hi &&
           post == other.post;
  }
};

struct Budget {
  std::int64_t max_splits = 10'000;
  double timeout_seconds = 60.0;
};

inline void check_budget(const Budget& b) {
  if (b.max_splits <= 0 || !(b.timeout_seconds > 0.0))
    throw std::invalid_argument("budget must be positive");
}

// Knobs of the seeded counterexample search; identical seeds give identical
// verdicts.
struct SearchParams {
  std::uint64_t seed = 0;
  int samples_per_box = 32;
  int refine_passes = 2;
  double strict_margin = 0.0;
};

enum class QueryStatus { Sat, Unsat, Unknown };

inline const char* query_status_str(QueryStatus s) {
  switch (s) {
    case QueryStatus::Sat: return "sat";
    case QueryStatus::Unsat: return "unsat";
    default: return "unknown";
  }
}

struct QueryVerdict {
  QueryStatus status = QueryStatus::Unknown;
  std::optional<Tensor> witness;  // Sat only: a concrete input satisfying P and all of Q
  double output = 0.0;            // Sat only: exact logit at the witness
  std::int64_t splits_used = 0;
  double bound_gap = 0.0;  // Unknown only: output-interval width of the first unresolved sub-box
};

inline nlohmann::json query_verdict_to_json(const QueryVerdict& v) {
  nlohmann::json j;
  j["status"] = query_status_str(v.status);
  j["splits_used"] = v.splits_used;
  if (v.status == QueryStatus::Sat && v.witness.has_value()) {
    j["witness"] = {{"shape", v.witness->shape()}, {"data", v.witness->data()}};
    j["output"] = v.output;
  }
  if (v.status == QueryStatus::Unknown) j["bound_gap"] = v.bound_gap;
  return j;
}

}  // namespace firecheck
