#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "firecheck/box_verify.hpp"
#include "firecheck/eval.hpp"
#include "firecheck/ibp.hpp"
#include "support.hpp"

using namespace firecheck;
using fcts::toy_network;
using fcts::vec;

TEST_CASE("post constraint semantics") {
  const PostConstraint le{1.0, CmpOp::Le, 25.0};
  CHECK(le.satisfied(25.0));
  CHECK(le.satisfied(24.0));
  CHECK_FALSE(le.satisfied(25.5));
  CHECK_FALSE(le.strict());
  CHECK(le.violation(30.0) == 5.0);
  CHECK(le.violation(20.0) == -5.0);

  const PostConstraint lt{1.0, CmpOp::Lt, 25.0};
  CHECK(lt.strict());
  CHECK_FALSE(lt.satisfied(25.0));
  CHECK(lt.satisfied(24.9));
  CHECK_FALSE(lt.satisfied(24.95, /*strict_margin=*/0.1));

  const PostConstraint ge{1.0, CmpOp::Ge, 10.0};
  CHECK(ge.satisfied(10.0));
  CHECK_FALSE(ge.satisfied(9.0));
  CHECK(ge.satisfying_y() == std::pair{10.0, std::numeric_limits<double>::infinity()});
  CHECK(le.satisfying_y() == std::pair{-std::numeric_limits<double>::infinity(), 25.0});

  // A negative coefficient flips which side of the line satisfies.
  const PostConstraint neg{-2.0, CmpOp::Le, -20.0};  // -2y <= -20, i.e. y >= 10
  CHECK(neg.satisfied(10.0));
  CHECK_FALSE(neg.satisfied(9.0));
  CHECK(neg.satisfying_y() == std::pair{10.0, std::numeric_limits<double>::infinity()});

  CHECK_THROWS_AS((PostConstraint{0.0, CmpOp::Le, 1.0}.satisfying_y()), std::invalid_argument);
}

TEST_CASE("query invariants and box round-trip") {
  CHECK_THROWS_AS(Query({2}, {0, 0}, {1, 1}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Query({2}, {0}, {1, 1}, {{1.0, CmpOp::Le, 0.0}}), std::invalid_argument);

  const Query q = Query::from_box(Box({2}, 0.0, 2.0), {{1.0, CmpOp::Le, 25.0}});
  CHECK(q.feasible());
  CHECK(q.box().contains(vec({1, 0})));

  const Query infeasible({2}, {1.0, 0.0}, {0.5, 1.0}, {{1.0, CmpOp::Le, 0.0}});
  CHECK_FALSE(infeasible.feasible());
  try {
    infeasible.box();
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("infeasible precondition") != std::string::npos);
  }
}

TEST_CASE("reference query is satisfiable and the witness is checkable") {
  const auto net = toy_network();
  const Query q = Query::from_box(Box({2}, 0.0, 2.0), {{1.0, CmpOp::Le, 25.0}});
  const auto v = verify_query(net, q);
  REQUIRE(v.status == QueryStatus::Sat);
  REQUIRE(v.witness.has_value());
  CHECK(q.box().contains(*v.witness));
  CHECK(query_satisfied(net, q, *v.witness));
  CHECK(v.output == eval_logit(net, *v.witness));
  CHECK(v.output <= 25.0);

  // The hand-picked satisfying point is accepted by the same checker.
  CHECK(query_satisfied(net, q, vec({1, 0})));
  CHECK_FALSE(query_satisfied(net, q, vec({1, 3})));  // logit 65
}

TEST_CASE("interval pruning settles clear misses at the root") {
  const auto net = toy_network();
  // Over the unit box the logit stays in [15,35]; y <= 10 can't be met.
  const Query q = Query::from_box(Box({2}, 0.0, 1.0), {{1.0, CmpOp::Le, 10.0}});
  const auto v = verify_query(net, q);
  CHECK(v.status == QueryStatus::Unsat);
  CHECK(v.splits_used == 0);

  const Query high = Query::from_box(Box({2}, 0.0, 1.0), {{1.0, CmpOp::Ge, 100.0}});
  CHECK(verify_query(net, high).status == QueryStatus::Unsat);
}

TEST_CASE("contradictory post constraints are unsat without any search") {
  const auto net = toy_network();
  const Query q = Query::from_box(Box({2}, 0.0, 1.0),
                                  {{1.0, CmpOp::Le, 0.0}, {1.0, CmpOp::Ge, 1.0}});
  const auto v = verify_query(net, q);
  CHECK(v.status == QueryStatus::Unsat);
  CHECK(v.splits_used == 0);
}

TEST_CASE("point preconditions are decided by exact evaluation") {
  const auto net = toy_network();
  const Box pt = Box::point(vec({1, 3}));

  const auto sat = verify_query(net, Query::from_box(pt, {{1.0, CmpOp::Ge, 65.0}}));
  REQUIRE(sat.status == QueryStatus::Sat);
  CHECK(*sat.witness == vec({1, 3}));
  CHECK(sat.output == 65.0);

  // Strict comparisons at the exact value fail, and the closed relaxation
  // that backs the unsat claim agrees once the box is a single point.
  CHECK(verify_query(net, Query::from_box(pt, {{1.0, CmpOp::Gt, 65.0}})).status ==
        QueryStatus::Unsat);
  CHECK(verify_query(net, Query::from_box(pt, {{1.0, CmpOp::Lt, 65.0}})).status ==
        QueryStatus::Unsat);
  CHECK(verify_query(net, Query::from_box(pt, {{1.0, CmpOp::Lt, 65.0 + 1e-9}})).status ==
        QueryStatus::Sat);
}

TEST_CASE("exhausted split budget reports unknown with a bound gap") {
  const auto net = toy_network();
  // Strictly below the attained minimum: never satisfiable, but the closed
  // relaxation y <= 15 keeps every sub-box alive, so the search can only
  // run out of budget.
  const Query q = Query::from_box(Box({2}, 0.0, 1.0), {{1.0, CmpOp::Lt, 15.0}});
  Budget b;
  b.max_splits = 1;
  const auto v = verify_query(net, q, b);
  CHECK(v.status == QueryStatus::Unknown);
  CHECK(v.splits_used == 1);
  CHECK(v.bound_gap > 0.0);
}

TEST_CASE("verify rejects bad budgets, zero coefficients, infeasible queries") {
  const auto net = toy_network();
  const Query q = Query::from_box(Box({2}, 0.0, 1.0), {{1.0, CmpOp::Le, 25.0}});
  CHECK_THROWS_AS(verify_query(net, q, Budget{0, 60.0}), std::invalid_argument);
  CHECK_THROWS_AS(verify_query(net, q, Budget{10, 0.0}), std::invalid_argument);

  const Query zero = Query::from_box(Box({2}, 0.0, 1.0), {{0.0, CmpOp::Le, 1.0}});
  CHECK_THROWS_AS(verify_query(net, zero), std::invalid_argument);

  const Query infeasible({2}, {1.0, 0.0}, {0.5, 1.0}, {{1.0, CmpOp::Le, 0.0}});
  CHECK_THROWS_AS(verify_query(net, infeasible), std::invalid_argument);
}

TEST_CASE("verdicts on random nets keep their promises") {
  Rng rng(47);
  Budget budget{200, 5.0};
  for (int trial = 0; trial < 12; ++trial) {
    const auto net = fcts::random_network(rng);
    const Box box(net.input_shape, -1.0, 1.0);
    const auto out = ibp_bounds(net, box);

    // Aim the threshold somewhere inside the coarse enclosure so all three
    // outcomes stay reachable across trials.
    const double cut = rng.uniform(out.lo, out.hi);
    const CmpOp op = (trial % 2 == 0) ? CmpOp::Le : CmpOp::Ge;
    const Query q = Query::from_box(box, {{1.0, op, cut}});
    const auto v = verify_query(net, q, budget);

    if (v.status == QueryStatus::Sat) {
      REQUIRE(v.witness.has_value());
      CHECK(q.box().contains(*v.witness));
      CHECK(query_satisfied(net, q, *v.witness));
    } else if (v.status == QueryStatus::Unsat) {
      for (int i = 0; i < 2000; ++i) {
        std::vector<double> x(box.size());
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = rng.uniform(-1.0, 1.0);
        CHECK_FALSE(query_satisfied(net, q, Tensor(net.input_shape, x)));
      }
    } else {
      CHECK(v.splits_used == budget.max_splits);
      CHECK(v.bound_gap > 0.0);
    }
  }
}

TEST_CASE("search is deterministic for a fixed seed") {
  Rng rng(53);
  const auto net = fcts::random_network(rng);
  const Box box(net.input_shape, -1.0, 1.0);
  const auto out = ibp_bounds(net, box);
  const Query q = Query::from_box(box, {{1.0, CmpOp::Le, out.lo + 0.25 * out.width()}});

  SearchParams params;
  params.seed = 99;
  const auto a = verify_query(net, q, Budget{200, 5.0}, params);
  const auto b = verify_query(net, q, Budget{200, 5.0}, params);
  CHECK(a.status == b.status);
  CHECK(a.splits_used == b.splits_used);
  CHECK(a.witness.has_value() == b.witness.has_value());
  if (a.witness.has_value()) {
    CHECK(a.witness->data() == b.witness->data());
    CHECK(a.output == b.output);
  }
}

TEST_CASE("query verdict JSON shapes") {
  const auto net = toy_network();
  const auto sat = verify_query(net, Query::from_box(Box({2}, 0.0, 2.0), {{1.0, CmpOp::Le, 25.0}}));
  const auto js = query_verdict_to_json(sat);
  CHECK(js["status"] == "sat");
  CHECK(js.contains("witness"));
  CHECK(js["witness"]["shape"] == std::vector<std::int64_t>{2});
  CHECK(js.contains("output"));
  CHECK_FALSE(js.contains("bound_gap"));

  const auto uns = verify_query(net, Query::from_box(Box({2}, 0.0, 1.0), {{1.0, CmpOp::Le, 10.0}}));
  const auto ju = query_verdict_to_json(uns);
  CHECK(ju["status"] == "unsat");
  CHECK_FALSE(ju.contains("witness"));

  Budget tiny{1, 60.0};
  const auto unk =
      verify_query(net, Query::from_box(Box({2}, 0.0, 1.0), {{1.0, CmpOp::Lt, 15.0}}), tiny);
  const auto jk = query_verdict_to_json(unk);
  CHECK(jk["status"] == "unknown");
  CHECK(jk["bound_gap"].get<double>() > 0.0);
}
