// Acceptance gate: nine end-to-end checks, one [PASS]/[FAIL] line each.
// Exit code is the number of failed checks. Tolerances are pinned here, in
// code, next to the checks that use them.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "firecheck/firecheck.hpp"
#include "support.hpp"

namespace {

using namespace firecheck;
using Clock = std::chrono::steady_clock;

int failed = 0;

void report(int idx, bool ok, const std::string& what) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << idx << ' ' << what << '\n';
  if (!ok) ++failed;
}

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Relative error scale used throughout: |a-b| <= kRelTol * (1 + |b|).
constexpr double kRelTol = 1e-9;

}  // namespace

int main() {
  std::cout.setf(std::ios::unitbuf);  // stream results as they happen

  // 1: golden forward evaluations, exact, under a millisecond.
  {
    const auto net = fcts::toy_network();
    volatile double warmup = eval_logit(net, fcts::vec({0, 0}));
    (void)warmup;
    const auto t0 = Clock::now();
    const double a = eval_logit(net, fcts::vec({1, 3}));
    const double b = eval_logit(net, fcts::vec({1, 0}));
    const double elapsed = ms_since(t0);
    std::ostringstream msg;
    msg << "golden evaluations: [1,3] -> " << format_double(a) << ", [1,0] -> "
        << format_double(b) << " in " << elapsed << " ms";
    report(1, a == 65.0 && b == 20.0 && elapsed < 1.0, msg.str());
  }

  // 2: the reference query is SAT with a checkable witness, under a second.
  {
    const auto net = fcts::toy_network();
    const Query q = Query::from_box(Box({2}, 0.0, 2.0), {{1.0, CmpOp::Le, 25.0}});
    const auto t0 = Clock::now();
    const auto v = verify_query(net, q);
    const double elapsed = ms_since(t0);

    bool ok = v.status == QueryStatus::Sat && v.witness.has_value() && elapsed < 1000.0;
    if (ok) {
      const double y = eval_logit(net, *v.witness);
      ok = y <= 25.0 && q.box().contains(*v.witness);
    }
    // The hand-picked satisfying point must validate through the same checker.
    ok = ok && query_satisfied(net, q, fcts::vec({1, 0})) &&
         eval_logit(net, fcts::vec({1, 0})) == 20.0;
    std::ostringstream msg;
    msg << "reference query SAT with valid witness in " << elapsed << " ms";
    report(2, ok, msg.str());
  }

  // 3 and 4 share a randomized corpus: 20 nets x 10 scenes.
  {
    Rng rng(2024);
    const auto t0 = Clock::now();
    double worst_rel = 0.0;
    bool grid_agrees = true;
    int inconsistent_scenes = 0;
    constexpr int kSamples = 10'000;

    for (int n = 0; n < 20; ++n) {
      fcts::NetGenOptions o;
      o.conv = (n % 2 == 0);
      const auto net = fcts::random_network(rng, o);
      for (int s = 0; s < 10; ++s) {
        const auto scene = fcts::random_scene(rng, net.input_shape);
        const auto g = propagate_ray(net, scene);
        const auto verdict = verify_local_consistency(net, scene);

        double running_max = -std::numeric_limits<double>::infinity();
        bool grid_refutes = false;
        for (int i = 0; i <= kSamples; ++i) {
          const double eps = scene.eps_range.lo +
                             (scene.eps_range.hi - scene.eps_range.lo) * i / kSamples;
          const double want = eval_logit(net, plant(scene.signal, scene.background, eps));
          worst_rel = std::max(worst_rel,
                               std::abs(g(eps) - want) / (1.0 + std::abs(want)));
          if (want < running_max - kRelTol * (1.0 + std::abs(want))) grid_refutes = true;
          running_max = std::max(running_max, want);
        }

        if (verdict.consistent()) {
          if (grid_refutes) grid_agrees = false;  // exact verdict contradicted
        } else {
          ++inconsistent_scenes;
          const double y1 = eval_logit(net, plant(scene.signal, scene.background, verdict.eps1));
          const double y2 = eval_logit(net, plant(scene.signal, scene.background, verdict.eps2));
          if (!(verdict.eps1 > verdict.eps2 && y1 < y2)) grid_agrees = false;
        }
      }
    }
    const double elapsed = ms_since(t0);

    std::ostringstream m3;
    m3 << "ray vs eval on 20 nets x 10 scenes x " << kSamples
       << " samples: worst relative error " << worst_rel << " in " << elapsed << " ms";
    report(3, worst_rel <= kRelTol && elapsed < 60'000.0, m3.str());

    std::ostringstream m4;
    m4 << "grid oracle agreement on 200 scenes (" << inconsistent_scenes
       << " inconsistent, each witness re-verified)";
    report(4, grid_agrees, m4.str());
  }

  // 5: monotone-by-construction nets: exact engine consistent 100/100, box
  // engine certifies within the default budget on small input spaces.
  {
    Rng rng(55);
    int local_ok = 0;
    for (int i = 0; i < 100; ++i) {
      fcts::NetGenOptions o;
      o.nonnegative = true;
      o.conv = (i % 2 == 0);
      const auto net = fcts::random_network(rng, o);
      const auto scene = fcts::random_scene(rng, net.input_shape, /*nonnegative_signal=*/true);
      if (verify_local_consistency(net, scene).consistent()) ++local_ok;
    }

    int global_ok = 0;
    for (int i = 0; i < 100; ++i) {
      fcts::NetGenOptions o;
      o.nonnegative = true;
      o.conv = false;  // keeps every instance at <= 16 inputs
      const auto net = fcts::random_network(rng, o);
      const auto v = verify_global_consistency(net, Box(net.input_shape, 0.0, 1.0),
                                               Box(net.input_shape, -1.0, 1.0), {0.0, 2.0});
      if (v.status == GlobalStatus::Holds) ++global_ok;
    }

    std::ostringstream msg;
    msg << "monotone nets: local consistent " << local_ok << "/100, global holds "
        << global_ok << "/100";
    report(5, local_ok == 100 && global_ok == 100, msg.str());
  }

  // 6: interval soundness, 100k sampled points across 50 (net, box) pairs.
  {
    Rng rng(66);
    std::int64_t violations = 0;
    for (int pair = 0; pair < 50; ++pair) {
      fcts::NetGenOptions o;
      o.conv = (pair % 2 == 0);
      const auto net = fcts::random_network(rng, o);
      const double lo = rng.uniform(-2.0, 0.0);
      const double hi = lo + rng.uniform(0.0, 3.0);
      const Box box(net.input_shape, lo, hi);
      const auto out = ibp_bounds(net, box);
      for (int i = 0; i < 2000; ++i) {
        std::vector<double> x(box.size());
        for (auto& v : x) v = rng.uniform(lo, hi);
        if (!out.contains(eval_logit(net, Tensor(net.input_shape, x)))) ++violations;
      }
    }
    std::ostringstream msg;
    msg << "interval soundness: " << violations << " violations over 100000 samples";
    report(6, violations == 0, msg.str());
  }

  // 7: point scene boxes: both engines must give the same verdict, and the
  // box engine may not fall back to unknown.
  {
    Rng rng(77);
    int agreed = 0, unknowns = 0;
    for (int i = 0; i < 50; ++i) {
      fcts::NetGenOptions o;
      o.conv = (i % 2 == 0);
      const auto net = fcts::random_network(rng, o);
      const auto scene = fcts::random_scene(rng, net.input_shape);
      const auto ray = verify_local_consistency(net, scene);
      const auto box = verify_global_consistency(net, Box::point(scene.signal),
                                                 Box::point(scene.background), scene.eps_range);
      if (box.status == GlobalStatus::Unknown) ++unknowns;
      if ((box.status == GlobalStatus::Holds) == ray.consistent() &&
          box.status != GlobalStatus::Unknown)
        ++agreed;
    }
    std::ostringstream msg;
    msg << "cross-engine agreement on 50 point scenes: " << agreed << "/50 ("
        << unknowns << " unknown)";
    report(7, agreed == 50 && unknowns == 0, msg.str());
  }

  // 8: seeded 10x10 scan: deterministic CSV, 100 rows, witnesses re-verify.
  {
    Rng rng(88);
    const auto net = fcts::random_network(rng, fcts::NetGenOptions{.conv = false});
    SimulateParams params;
    params.signal_count = 10;
    params.background_count = 10;
    params.eps_range = {0.0, 2.0};

    const auto t0 = Clock::now();
    const auto scenes = generate_scene_set(4242, net.input_shape, params);
    const auto report_a = scan_dataset_consistency(net, scenes);
    const auto csv_a = scan_report_to_csv(report_a);
    const auto csv_b =
        scan_report_to_csv(scan_dataset_consistency(net, generate_scene_set(4242, net.input_shape, params)));
    const double elapsed = ms_since(t0);

    std::int64_t rows = std::count(csv_a.begin(), csv_a.end(), '\n') - 1;
    bool witnesses_ok = true;
    for (const auto& e : report_a.entries) {
      if (!e.ok() || e.verdict.consistent()) continue;
      const auto scene = scenes.scene(e.signal_idx, e.background_idx);
      const double y1 = eval_logit(net, plant(scene.signal, scene.background, e.verdict.eps1));
      const double y2 = eval_logit(net, plant(scene.signal, scene.background, e.verdict.eps2));
      if (!(y1 < y2 && y1 == e.verdict.value1 && y2 == e.verdict.value2)) witnesses_ok = false;
    }

    std::ostringstream msg;
    msg << "seeded scan: " << rows << " rows, deterministic " << (csv_a == csv_b)
        << ", " << report_a.inconsistent_count << " inconsistent all re-verified, in "
        << elapsed << " ms";
    report(8, rows == 100 && csv_a == csv_b && witnesses_ok &&
                  report_a.inconsistent_count > 0 && report_a.error_count == 0 &&
                  elapsed < 30'000.0,
           msg.str());
  }

  // 9: parser robustness: 100k fuzz inputs crash-free, 1000 round-trips exact.
  {
    Rng rng(99);
    const std::string alphabet = "prexyinost:[]<>=,.*#0123456789e+- \t\n";
    bool crash_free = true;
    std::string crash_detail;
    for (int i = 0; i < 100'000 && crash_free; ++i) {
      std::string text;
      if (i % 4 == 0) {
        // Mutate a valid query so deep parser states get exercised too.
        text = "pre: x[0] in [0, 1]\npre: x[1] in [0, 2]\npost: y <= 25\n";
        const int edits = 1 + static_cast<int>(rng.below(4));
        for (int k = 0; k < edits; ++k)
          text[rng.below(text.size())] = alphabet[rng.below(alphabet.size())];
      } else {
        const auto len = rng.below(70);
        for (std::uint64_t k = 0; k < len; ++k) text += alphabet[rng.below(alphabet.size())];
      }
      try {
        (void)parse_query({text}, {2});
      } catch (const QueryParseError&) {
        // the one sanctioned failure mode
      } catch (const std::exception& e) {
        crash_free = false;
        crash_detail = e.what();
      }
    }

    int round_trips = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto n = static_cast<std::int64_t>(1 + rng.below(6));
      std::vector<double> lo(static_cast<std::size_t>(n)), hi(lo.size());
      for (std::size_t k = 0; k < lo.size(); ++k) {
        const double a = rng.uniform(-1e6, 1e6), b = rng.uniform(-1e6, 1e6);
        lo[k] = std::min(a, b);
        hi[k] = std::max(a, b);
      }
      std::vector<PostConstraint> post;
      const CmpOp ops[] = {CmpOp::Le, CmpOp::Ge, CmpOp::Lt, CmpOp::Gt};
      const int posts = 1 + static_cast<int>(rng.below(3));
      for (int k = 0; k < posts; ++k)
        post.push_back({1.0, ops[rng.below(4)], rng.uniform(-1e9, 1e9)});
      const Query q({n}, std::move(lo), std::move(hi), std::move(post));
      if (parse_query({render_query(q)}, {n}) == q) ++round_trips;
    }

    std::ostringstream msg;
    msg << "parser: 100000 fuzz inputs crash-free " << crash_free << ", round-trips "
        << round_trips << "/1000";
    if (!crash_free) msg << " (escaped: " << crash_detail << ")";
    report(9, crash_free && round_trips == 1000, msg.str());
  }

  std::cout << (failed == 0 ? "acceptance: all criteria passed\n"
                            : "acceptance: " + std::to_string(failed) + " criteria failed\n");
  return failed;
}
