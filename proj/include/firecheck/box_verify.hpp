// Branch-and-bound decision of P-and-Q queries over input boxes.
//
// Sat requires a concrete witness confirmed by exact evaluation; Unsat
// requires every sub-box's sound output enclosure to be disjoint from the
// set of outputs that could satisfy the postcondition; Unknown reports how
// much budget was spent and how wide the first unresolved enclosure still
// was. The frontier is processed breadth-first in insertion order, so
// verdicts are deterministic for a fixed seed.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "firecheck/eval.hpp"
#include "firecheck/ibp.hpp"
#include "firecheck/query.hpp"
#include "firecheck/rng.hpp"

namespace firecheck {

// Exact membership check: x inside the precondition box and every post
// constraint satisfied by eval's logit. Any reported witness passes this.
inline bool query_satisfied(const Network& net, const Query& query, const Tensor& x,
                            double strict_margin = 0.0) {
  if (!query.box().contains(x)) return false;
  const double y = eval_logit(net, x);
  for (const auto& c : query.post) {
    if (!c.satisfied(y, strict_margin)) return false;
  }
  return true;
}

namespace detail {

// Intersection of the closed satisfying-output sets of all post constraints;
// nullopt when the constraints contradict each other outright.
inline std::optional<std::pair<double, double>> satisfying_y_hull(
    const std::vector<PostConstraint>& post) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& c : post) {
    const auto [clo, chi] = c.satisfying_y();
    lo = std::max(lo, clo);
    hi = std::min(hi, chi);
    if (lo > hi) return std::nullopt;
  }
  return std::pair{lo, hi};
}

// Largest violation across constraints; <= 0 iff all are (non-strictly) met.
inline double worst_violation(const std::vector<PostConstraint>& post, double y) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : post) worst = std::max(worst, c.violation(y));
  return worst;
}

// Coordinate-descent polish of a candidate: per pass, each dimension tries
// its box endpoints and keeps whichever output violates the postcondition
// least. Cheap (3 evals per coordinate) and often enough to walk a near-miss
// sample onto a satisfying corner.
inline Tensor refine_candidate(const Network& net, const Box& box,
                               const std::vector<PostConstraint>& post, Tensor x, int passes) {
  std::vector<double> v = x.data();
  double best = worst_violation(post, eval_logit(net, x));
  for (int pass = 0; pass < passes; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double keep = v[i];
      for (const double cand : {box[i].lo, box[i].hi}) {
        if (cand == keep) continue;
        v[i] = cand;
        const double score = worst_violation(post, eval_logit(net, Tensor(box.shape(), v)));
        if (score < best) {
          best = score;
          improved = true;
        } else {
          v[i] = keep;
        }
        if (v[i] == cand) break;  // keep the improvement, skip the other endpoint
      }
    }
    if (!improved) break;
  }
  return Tensor(box.shape(), std::move(v));
}

// Index of the widest dimension relative to the root box (deterministic
// lowest-index tie-break), or nullopt when no dimension can be halved.
inline std::optional<std::size_t> widest_dim(const Box& box, const std::vector<double>& root_width) {
  std::optional<std::size_t> best;
  double best_w = 0.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (root_width[i] <= 0.0) continue;
    const double mid = box[i].mid();
    if (!(mid > box[i].lo) || !(mid < box[i].hi)) continue;  // below floating resolution
    const double w = box[i].width() / root_width[i];
    if (w > best_w) {
      best_w = w;
      best = i;
    }
  }
  return best;
}

inline std::pair<Box, Box> split_box(const Box& box, std::size_t dim) {
  std::vector<Interval> a = box.dims(), b = box.dims();
  const double mid = box[dim].mid();
  a[dim] = Interval(box[dim].lo, mid);
  b[dim] = Interval(mid, box[dim].hi);
  return {Box(box.shape(), std::move(a)), Box(box.shape(), std::move(b))};
}

}  // namespace detail

inline QueryVerdict verify_query(const Network& net, const Query& query, const Budget& budget = {},
                                 const SearchParams& params = {}) {
  const auto vr = validate(net);
  require_valid(net, vr);
  check_budget(budget);
  const Box root = query.box();  // rejects infeasible preconditions
  detail::require_box_shape(net, root);
  for (const auto& c : query.post) {
    if (c.coeff == 0.0) throw std::invalid_argument("post constraint has zero coefficient");
  }

  QueryVerdict verdict;
  const auto hull = detail::satisfying_y_hull(query.post);
  if (!hull.has_value()) {
    verdict.status = QueryStatus::Unsat;  // contradictory postcondition: nothing can satisfy it
    return verdict;
  }
  const auto [q_lo, q_hi] = *hull;

  std::vector<double> root_width(root.size());
  for (std::size_t i = 0; i < root.size(); ++i) root_width[i] = root[i].width();

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(budget.timeout_seconds));

  std::deque<Box> frontier{root};
  std::uint64_t box_counter = 0;

  const auto try_witness = [&](const Tensor& x) -> bool {
    const double y = eval_logit(net, x);
    for (const auto& c : query.post) {
      if (!c.satisfied(y, params.strict_margin)) return false;
    }
    verdict.status = QueryStatus::Sat;
    verdict.witness = x;
    verdict.output = y;
    return true;
  };

  while (!frontier.empty()) {
    const Box box = std::move(frontier.front());
    frontier.pop_front();
    const std::uint64_t box_id = box_counter++;

    const Interval out = ibp_bounds(net, box);
    if (out.hi < q_lo || out.lo > q_hi) continue;  // no output here can satisfy Q

    if (box.is_point()) {
      // A point box holds a single input; eval decides it outright.
      if (try_witness(box.lower())) return verdict;
      continue;
    }

    // Counterexample search: deterministic anchors, then seeded samples, each
    // polished by coordinate descent before the exact acceptance check.
    {
      Rng rng(mix_seeds(params.seed, box_id));
      std::vector<Tensor> candidates{box.lower(), box.upper(), box.midpoint()};
      for (int s = 0; s < params.samples_per_box; ++s) {
        std::vector<double> v(box.size());
        for (std::size_t i = 0; i < box.size(); ++i) v[i] = rng.uniform(box[i].lo, box[i].hi);
        candidates.emplace_back(box.shape(), std::move(v));
      }
      for (auto& cand : candidates) {
        if (try_witness(cand)) return verdict;
        const Tensor refined = detail::refine_candidate(net, box, query.post, cand,
                                                        params.refine_passes);
        if (try_witness(refined)) return verdict;
      }
    }

    const auto dim = detail::widest_dim(box, root_width);
    const bool exhausted = verdict.splits_used >= budget.max_splits ||
                           std::chrono::steady_clock::now() >= deadline;
    if (!dim.has_value() || exhausted) {
      verdict.status = QueryStatus::Unknown;
      verdict.bound_gap = out.width();
      return verdict;
    }
    auto [first, second] = detail::split_box(box, *dim);
    ++verdict.splits_used;
    frontier.push_back(std::move(first));
    frontier.push_back(std::move(second));
  }

  verdict.status = QueryStatus::Unsat;  // every sub-box was proved incapable of satisfying Q
  return verdict;
}

}  // namespace firecheck
