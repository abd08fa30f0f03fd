// Global consistency over boxes of scenes, and exact scans of finite scene
// sets.
//
// The box question: does growing the planted signal ever lower the logit, for
// ANY signal in signal_box, background in background_box, and eps_lo <= eps2
// <= eps1 <= eps_hi? Certifying "no" with two independent interval runs is
// hopeless — the two copies share their scene, and decoupled bounds can never
// separate logit(x1) - logit(x2) from below once the net is nonconstant. The
// engine therefore propagates a coupled triple per neuron:
//
//   first   enclosure of the neuron on x_b + eps1 * x_s
//   second  enclosure of the neuron on x_b + eps2 * x_s
//   diff    enclosure of first - second over COUPLED inputs, seeded at the
//           input layer from (eps1 - eps2) * s_j with eps1 - eps2 >= 0
//
// Affine layers combine diffs exactly (shared biases cancel); ReLU is
// monotone and 1-Lipschitz, so a pre-activation gap of [a, b] becomes a gap
// inside [min(0, a), max(0, b)]; a max pool's gap lies between the smallest
// and largest per-window gap. Every rule intersects with the decoupled
// difference, so diff never loses to the naive bound. A sub-box is certified
// the moment diff.lo >= 0 at the output.
//
// Point scene boxes (single signal and background) are decided exactly by the
// ray engine instead, so degenerate global queries agree with local verdicts
// by construction.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "firecheck/eval.hpp"
#include "firecheck/fmt.hpp"
#include "firecheck/ibp.hpp"
#include "firecheck/planting.hpp"
#include "firecheck/query.hpp"
#include "firecheck/ray_consistency.hpp"
#include "firecheck/rng.hpp"

namespace firecheck {

namespace detail {

struct TwinValue {
  Interval first;
  Interval second;
  Interval diff;  // invariant: encloses first - second over coupled inputs
};

struct TwinOps {
  using Value = TwinValue;

  Value affine(const std::vector<AffineTerm<Value>>& terms, double bias) const {
    double f_lo = bias, f_hi = bias, s_lo = bias, s_hi = bias, d_lo = 0.0, d_hi = 0.0;
    for (const auto& t : terms) {
      const Interval pf = scale(t.coeff, t.value->first);
      const Interval ps = scale(t.coeff, t.value->second);
      const Interval pd = scale(t.coeff, t.value->diff);
      f_lo = add_down(f_lo, pf.lo);
      f_hi = add_up(f_hi, pf.hi);
      s_lo = add_down(s_lo, ps.lo);
      s_hi = add_up(s_hi, ps.hi);
      d_lo = add_down(d_lo, pd.lo);
      d_hi = add_up(d_hi, pd.hi);
    }
    return finish({f_lo, f_hi}, {s_lo, s_hi}, {d_lo, d_hi});
  }

  Value relu(const Value& v) const {
    const Interval first{std::max(0.0, v.first.lo), std::max(0.0, v.first.hi)};
    const Interval second{std::max(0.0, v.second.lo), std::max(0.0, v.second.hi)};
    // relu(a) - relu(b) has the sign of a - b and no greater magnitude.
    const Interval diff{std::min(0.0, v.diff.lo), std::max(0.0, v.diff.hi)};
    return finish(first, second, diff);
  }

  Value max(const std::vector<const Value*>& items) const {
    double f_lo = items[0]->first.lo, f_hi = items[0]->first.hi;
    double s_lo = items[0]->second.lo, s_hi = items[0]->second.hi;
    double d_lo = items[0]->diff.lo, d_hi = items[0]->diff.hi;
    for (std::size_t i = 1; i < items.size(); ++i) {
      f_lo = std::max(f_lo, items[i]->first.lo);
      f_hi = std::max(f_hi, items[i]->first.hi);
      s_lo = std::max(s_lo, items[i]->second.lo);
      s_hi = std::max(s_hi, items[i]->second.hi);
      // max_j a_j - max_j b_j lies between the extreme per-slot gaps.
      d_lo = std::min(d_lo, items[i]->diff.lo);
      d_hi = std::max(d_hi, items[i]->diff.hi);
    }
    return finish({f_lo, f_hi}, {s_lo, s_hi}, {d_lo, d_hi});
  }

 private:
  // Tighten the coupled gap with the decoupled one; both enclose it, so the
  // intersection is never empty (guarded anyway for rounding paranoia).
  static Value finish(Interval first, Interval second, Interval diff) {
    const Interval decoupled = sub(first, second);
    const auto tight = intersect(diff, decoupled);
    return {first, second, tight.value_or(decoupled)};
  }
};

// One branch-and-bound cell: scene boxes plus the two eps intervals,
// maintained feasible (some eps1 >= eps2 exists) and tightened to the
// feasible part whenever eps bounds move.
struct TwinCell {
  std::vector<Interval> sig;
  std::vector<Interval> bg;
  Interval e1;
  Interval e2;
};

inline std::optional<TwinCell> tighten_cell(TwinCell cell) {
  if (cell.e1.hi < cell.e2.lo) return std::nullopt;  // entirely inside eps1 < eps2
  cell.e1 = Interval(std::max(cell.e1.lo, cell.e2.lo), cell.e1.hi);
  cell.e2 = Interval(cell.e2.lo, std::min(cell.e2.hi, cell.e1.hi));
  return cell;
}

inline std::vector<TwinValue> twin_inputs(const TwinCell& cell) {
  const Interval gap{std::max(0.0, sub_down(cell.e1.lo, cell.e2.hi)),
                     std::max(0.0, sub_up(cell.e1.hi, cell.e2.lo))};
  std::vector<TwinValue> in;
  in.reserve(cell.sig.size());
  for (std::size_t j = 0; j < cell.sig.size(); ++j) {
    const Interval x1 = add(cell.bg[j], mul(cell.e1, cell.sig[j]));
    const Interval x2 = add(cell.bg[j], mul(cell.e2, cell.sig[j]));
    const Interval coupled = mul(gap, cell.sig[j]);
    const Interval decoupled = sub(x1, x2);
    in.push_back({x1, x2, intersect(coupled, decoupled).value_or(decoupled)});
  }
  return in;
}

}  // namespace detail

enum class GlobalStatus { Holds, Violated, Unknown };

inline const char* global_status_str(GlobalStatus s) {
  switch (s) {
    case GlobalStatus::Holds: return "holds";
    case GlobalStatus::Violated: return "violated";
    default: return "unknown";
  }
}

struct GlobalVerdict {
  GlobalStatus status = GlobalStatus::Unknown;
  // Violated only: a fully concrete scene and eps pair, both values from
  // plain forward evaluation, so eps1 > eps2 yet value1 < value2.
  std::optional<Tensor> signal;
  std::optional<Tensor> background;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double value1 = 0.0;
  double value2 = 0.0;
  double margin = 0.0;
  std::int64_t splits_used = 0;
  double bound_gap = 0.0;  // Unknown only: certificate deficit (how far diff.lo was below 0)
};

inline nlohmann::json global_verdict_to_json(const GlobalVerdict& v) {
  nlohmann::json j;
  j["status"] = global_status_str(v.status);
  j["splits_used"] = v.splits_used;
  if (v.status == GlobalStatus::Violated) {
    j["signal"] = {{"shape", v.signal->shape()}, {"data", v.signal->data()}};
    j["background"] = {{"shape", v.background->shape()}, {"data", v.background->data()}};
    j["eps1"] = v.eps1;
    j["eps2"] = v.eps2;
    j["value1"] = v.value1;
    j["value2"] = v.value2;
    j["margin"] = v.margin;
  }
  if (v.status == GlobalStatus::Unknown) j["bound_gap"] = v.bound_gap;
  return j;
}

inline GlobalVerdict verify_global_consistency(const Network& net, const Box& signal_box,
                                               const Box& background_box, EpsRange eps_range,
                                               const Budget& budget = {},
                                               const SearchParams& params = {}) {
  const auto vr = validate(net);
  require_valid(net, vr);
  detail::require_box_shape(net, signal_box);
  detail::require_box_shape(net, background_box);
  check_eps_range(eps_range);
  check_budget(budget);

  GlobalVerdict verdict;

  // Degenerate scene boxes pin down a single scene; the ray engine decides it
  // exactly, and its witnesses are already eval-confirmed.
  if (signal_box.is_point() && background_box.is_point()) {
    const Scene scene(signal_box.lower(), background_box.lower(), eps_range);
    const ConsistencyVerdict local = verify_local_consistency(net, scene);
    if (local.consistent()) {
      verdict.status = GlobalStatus::Holds;
    } else {
      verdict.status = GlobalStatus::Violated;
      verdict.signal = scene.signal;
      verdict.background = scene.background;
      verdict.eps1 = local.eps1;
      verdict.eps2 = local.eps2;
      verdict.value1 = local.value1;
      verdict.value2 = local.value2;
      verdict.margin = local.margin;
    }
    return verdict;
  }

  const std::size_t n = signal_box.size();
  detail::TwinCell root{signal_box.dims(), background_box.dims(),
                        Interval(eps_range.lo, eps_range.hi),
                        Interval(eps_range.lo, eps_range.hi)};

  // Normalization widths for the split heuristic: scene coordinates then the
  // two eps coordinates.
  std::vector<double> root_width(2 * n + 2);
  for (std::size_t i = 0; i < n; ++i) root_width[i] = signal_box[i].width();
  for (std::size_t i = 0; i < n; ++i) root_width[n + i] = background_box[i].width();
  root_width[2 * n] = root_width[2 * n + 1] = eps_range.hi - eps_range.lo;

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(budget.timeout_seconds));

  const auto scene_logit = [&](const Tensor& sig, const Tensor& bg, double eps) {
    return eval_logit(net, plant(sig, bg, eps));
  };

  std::deque<detail::TwinCell> frontier{root};
  std::uint64_t cell_counter = 0;

  while (!frontier.empty()) {
    const detail::TwinCell cell = std::move(frontier.front());
    frontier.pop_front();
    const std::uint64_t cell_id = cell_counter++;

    const detail::TwinValue out = propagate_logit(net, vr.output_shapes,
                                                  detail::twin_inputs(cell), detail::TwinOps{});
    if (out.diff.lo >= 0.0) continue;  // certified: logit gap never negative on this cell

    // Falsification: seeded scenes with a feasible eps pair, then coordinate
    // descent pushing value1 - value2 as low as it will go.
    {
      Rng rng(mix_seeds(params.seed, cell_id));
      const auto cell_tensor = [&](const std::vector<Interval>& dims, int which) {
        std::vector<double> v(dims.size());
        for (std::size_t i = 0; i < dims.size(); ++i) {
          v[i] = which == 0 ? dims[i].lo : (which == 1 ? dims[i].hi : dims[i].mid());
        }
        return Tensor(signal_box.shape(), std::move(v));
      };

      struct Candidate {
        Tensor sig, bg;
        double eps1, eps2;
      };
      std::vector<Candidate> candidates;
      for (int which = 0; which < 3; ++which) {
        candidates.push_back({cell_tensor(cell.sig, which), cell_tensor(cell.bg, which),
                              cell.e1.hi, cell.e2.lo});
      }
      for (int s = 0; s < params.samples_per_box; ++s) {
        std::vector<double> sv(n), bv(n);
        for (std::size_t i = 0; i < n; ++i) sv[i] = rng.uniform(cell.sig[i].lo, cell.sig[i].hi);
        for (std::size_t i = 0; i < n; ++i) bv[i] = rng.uniform(cell.bg[i].lo, cell.bg[i].hi);
        const double eps2 = rng.uniform(cell.e2.lo, cell.e2.hi);
        const double eps1 = rng.uniform(std::max(cell.e1.lo, eps2), cell.e1.hi);
        candidates.push_back({Tensor(signal_box.shape(), std::move(sv)),
                              Tensor(signal_box.shape(), std::move(bv)), eps1, eps2});
      }

      for (auto& cand : candidates) {
        std::vector<double> sv = cand.sig.data(), bv = cand.bg.data();
        double eps1 = cand.eps1, eps2 = cand.eps2;
        double obj = scene_logit(cand.sig, cand.bg, eps1) - scene_logit(cand.sig, cand.bg, eps2);
        for (int pass = 0; pass < params.refine_passes && obj >= 0.0; ++pass) {
          bool improved = false;
          const auto try_coord = [&](double& slot, double lo, double hi) {
            const double keep = slot;
            for (const double alt : {lo, hi}) {
              if (alt == keep) continue;
              slot = alt;
              const Tensor sig(signal_box.shape(), sv), bg(signal_box.shape(), bv);
              const double o = scene_logit(sig, bg, eps1) - scene_logit(sig, bg, eps2);
              if (o < obj) {
                obj = o;
                improved = true;
                return;
              }
              slot = keep;
            }
          };
          for (std::size_t i = 0; i < n; ++i) try_coord(sv[i], cell.sig[i].lo, cell.sig[i].hi);
          for (std::size_t i = 0; i < n; ++i) try_coord(bv[i], cell.bg[i].lo, cell.bg[i].hi);
          try_coord(eps1, std::max(cell.e1.lo, eps2), cell.e1.hi);
          try_coord(eps2, cell.e2.lo, std::min(cell.e2.hi, eps1));
          if (!improved) break;
        }
        if (obj < 0.0) {
          const Tensor sig(signal_box.shape(), std::move(sv));
          const Tensor bg(signal_box.shape(), std::move(bv));
          verdict.status = GlobalStatus::Violated;
          verdict.signal = sig;
          verdict.background = bg;
          verdict.eps1 = eps1;
          verdict.eps2 = eps2;
          verdict.value1 = scene_logit(sig, bg, eps1);
          verdict.value2 = scene_logit(sig, bg, eps2);
          verdict.margin = verdict.value2 - verdict.value1;
          return verdict;
        }
      }
    }

    // Split the widest normalized coordinate among signal, background, eps1,
    // eps2; children falling wholly inside eps1 < eps2 are dropped.
    std::optional<std::size_t> dim;
    double best_w = 0.0;
    const auto consider = [&](std::size_t idx, const Interval& iv) {
      if (root_width[idx] <= 0.0) return;
      const double mid = iv.mid();
      if (!(mid > iv.lo) || !(mid < iv.hi)) return;
      const double w = iv.width() / root_width[idx];
      if (w > best_w) {
        best_w = w;
        dim = idx;
      }
    };
    for (std::size_t i = 0; i < n; ++i) consider(i, cell.sig[i]);
    for (std::size_t i = 0; i < n; ++i) consider(n + i, cell.bg[i]);
    consider(2 * n, cell.e1);
    consider(2 * n + 1, cell.e2);

    const bool exhausted = verdict.splits_used >= budget.max_splits ||
                           std::chrono::steady_clock::now() >= deadline;
    if (!dim.has_value() || exhausted) {
      verdict.status = GlobalStatus::Unknown;
      verdict.bound_gap = -out.diff.lo;
      return verdict;
    }

    detail::TwinCell a = cell, b = cell;
    const std::size_t idx = *dim;
    if (idx < n) {
      const double mid = cell.sig[idx].mid();
      a.sig[idx] = Interval(cell.sig[idx].lo, mid);
      b.sig[idx] = Interval(mid, cell.sig[idx].hi);
    } else if (idx < 2 * n) {
      const double mid = cell.bg[idx - n].mid();
      a.bg[idx - n] = Interval(cell.bg[idx - n].lo, mid);
      b.bg[idx - n] = Interval(mid, cell.bg[idx - n].hi);
    } else if (idx == 2 * n) {
      const double mid = cell.e1.mid();
      a.e1 = Interval(cell.e1.lo, mid);
      b.e1 = Interval(mid, cell.e1.hi);
    } else {
      const double mid = cell.e2.mid();
      a.e2 = Interval(cell.e2.lo, mid);
      b.e2 = Interval(mid, cell.e2.hi);
    }
    ++verdict.splits_used;
    if (auto ta = detail::tighten_cell(std::move(a))) frontier.push_back(std::move(*ta));
    if (auto tb = detail::tighten_cell(std::move(b))) frontier.push_back(std::move(*tb));
  }

  verdict.status = GlobalStatus::Holds;
  return verdict;
}

// ---------------------------------------------------------------------------
// Exact dataset scans: every (signal, background) pair through the ray engine.

struct ScanEntry {
  std::int64_t signal_idx = 0;
  std::int64_t background_idx = 0;
  ConsistencyVerdict verdict;
  std::string error;  // non-empty when propagation failed for this pair

  bool ok() const { return error.empty(); }
};

struct ScanReport {
  std::vector<ScanEntry> entries;  // ordered by (signal_idx, background_idx)
  std::int64_t consistent_count = 0;
  std::int64_t inconsistent_count = 0;
  std::int64_t error_count = 0;
  double consistent_fraction = 0.0;  // consistent / all pairs
  double worst_margin = 0.0;         // largest inconsistency margin (0 when none)
};

inline ScanReport scan_dataset_consistency(const Network& net, const SceneSet& scenes,
                                           const PropagateOptions& options = {}) {
  ScanReport report;
  const auto n_sig = static_cast<std::int64_t>(scenes.signals.size());
  const auto n_bg = static_cast<std::int64_t>(scenes.backgrounds.size());
  report.entries.reserve(static_cast<std::size_t>(n_sig * n_bg));
  for (std::int64_t si = 0; si < n_sig; ++si) {
    for (std::int64_t bi = 0; bi < n_bg; ++bi) {
      ScanEntry entry;
      entry.signal_idx = si;
      entry.background_idx = bi;
      try {
        entry.verdict = verify_local_consistency(
            net, scenes.scene(static_cast<std::size_t>(si), static_cast<std::size_t>(bi)),
            options);
        if (entry.verdict.consistent()) {
          ++report.consistent_count;
        } else {
          ++report.inconsistent_count;
          report.worst_margin = std::max(report.worst_margin, entry.verdict.margin);
        }
      } catch (const std::exception& e) {
        entry.error = e.what();
        ++report.error_count;
      }
      report.entries.push_back(std::move(entry));
    }
  }
  if (!report.entries.empty()) {
    report.consistent_fraction =
        static_cast<double>(report.consistent_count) / static_cast<double>(report.entries.size());
  }
  return report;
}

inline nlohmann::json scan_report_to_json(const ScanReport& report) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& e : report.entries) {
    nlohmann::json row;
    row["signal_idx"] = e.signal_idx;
    row["background_idx"] = e.background_idx;
    if (e.ok()) {
      row.update(consistency_verdict_to_json(e.verdict));
    } else {
      row["status"] = "error";
      row["error"] = e.error;
    }
    pairs.push_back(std::move(row));
  }
  return nlohmann::json{{"pairs", std::move(pairs)},
                        {"consistent_count", report.consistent_count},
                        {"inconsistent_count", report.inconsistent_count},
                        {"error_count", report.error_count},
                        {"consistent_fraction", report.consistent_fraction},
                        {"worst_margin", report.worst_margin}};
}

// One row per pair; empty cells where a field does not apply.
inline std::string scan_report_to_csv(const ScanReport& report) {
  std::string out = "signal_idx,background_idx,status,eps1,eps2,margin,segments\n";
  for (const auto& e : report.entries) {
    out += std::to_string(e.signal_idx);
    out += ',';
    out += std::to_string(e.background_idx);
    out += ',';
    if (!e.ok()) {
      out += "error,,,,\n";
      continue;
    }
    if (e.verdict.consistent()) {
      out += "consistent,,,,";
      out += std::to_string(e.verdict.segments);
    } else {
      out += "inconsistent,";
      out += format_double(e.verdict.eps1);
      out += ',';
      out += format_double(e.verdict.eps2);
      out += ',';
      out += format_double(e.verdict.margin);
      out += ',';
      out += std::to_string(e.verdict.segments);
    }
    out += '\n';
  }
  return out;
}

}  // namespace firecheck
