#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "firecheck/planting.hpp"
#include "support.hpp"

using namespace firecheck;

TEST_CASE("scene invariants") {
  const Tensor s = fcts::vec({1.0, 2.0});
  const Tensor b = fcts::vec({0.0, 0.0});
  CHECK_NOTHROW(Scene(s, b, EpsRange{0.0, 2.0}));
  CHECK_THROWS_AS(Scene(s, Tensor::zeros({3}), EpsRange{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Scene(s, b, EpsRange{1.0, 0.0}), std::invalid_argument);   // lo > hi
  CHECK_THROWS_AS(Scene(s, b, EpsRange{-0.5, 1.0}), std::invalid_argument);  // negative lo
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Scene(s, b, EpsRange{0.0, inf}), std::invalid_argument);
}

TEST_CASE("scene set invariants") {
  const Tensor t = fcts::vec({1.0});
  CHECK_THROWS_AS(SceneSet({}, {t}, EpsRange{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SceneSet({t}, {}, EpsRange{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SceneSet({t, Tensor::zeros({2})}, {t}, EpsRange{0.0, 1.0}),
                  std::invalid_argument);
  const SceneSet set({t, t}, {t, t, t}, EpsRange{0.0, 1.0});
  CHECK(set.scene(1, 2).signal == t);
}

TEST_CASE("plant basics") {
  const Tensor s = fcts::vec({1.0, 2.0});
  const Tensor b = fcts::vec({10.0, 10.0});

  CHECK(plant(s, b, 0.0) == b);
  CHECK(plant(s, b, 2.0) == fcts::vec({12.0, 14.0}));
  CHECK_THROWS_AS(plant(s, Tensor::zeros({3}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(plant(s, b, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("plant linearity identity on random tensors") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Shape shape{1 + static_cast<std::int64_t>(rng.below(6))};
    const Tensor s = fcts::random_tensor(rng, shape, -2.0, 2.0);
    const Tensor b = fcts::random_tensor(rng, shape, -2.0, 2.0);
    const double e1 = rng.uniform(0.0, 3.0), e2 = rng.uniform(0.0, 3.0);
    const Tensor p1 = plant(s, b, e1), p2 = plant(s, b, e2);
    for (std::size_t i = 0; i < s.data().size(); ++i) {
      CHECK(p1[i] - p2[i] == Catch::Approx((e1 - e2) * s[i]).margin(1e-12));
    }
  }
}

TEST_CASE("planting commutes with signal scaling") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Shape shape{4};
    const Tensor s = fcts::random_tensor(rng, shape, -1.0, 1.0);
    const Tensor b = fcts::random_tensor(rng, shape, -1.0, 1.0);
    const double a = rng.uniform(0.1, 3.0), eps = rng.uniform(0.0, 2.0);
    std::vector<double> scaled = s.data();
    for (auto& x : scaled) x *= a;
    const Tensor lhs = plant(Tensor(shape, scaled), b, eps);
    const Tensor rhs = plant(s, b, a * eps);
    for (std::size_t i = 0; i < lhs.data().size(); ++i)
      CHECK(lhs[i] == Catch::Approx(rhs[i]).margin(1e-12));
  }
}

TEST_CASE("generate_background determinism and range") {
  const Shape shape{1, 4, 4};
  const Tensor a = generate_background(1, shape, {});
  const Tensor b = generate_background(1, shape, {});
  CHECK(a == b);

  const Tensor c = generate_background(2, shape, {});
  CHECK_FALSE(a == c);

  BackgroundParams zero;
  zero.amplitude = 0.0;
  CHECK(generate_background(7, shape, zero) == Tensor::zeros(shape));

  for (int seed = 0; seed < 100; ++seed) {
    BackgroundParams params;
    const Tensor t = generate_background(static_cast<std::uint64_t>(seed), shape, params);
    for (double v : t.data()) {
      CHECK(v >= 0.0);
      CHECK(v <= params.amplitude);
    }
  }
}

TEST_CASE("generate_signal contracts") {
  const Shape shape{3, 5, 5};

  SECTION("deterministic and nonnegative, last channel peaks at 1") {
    for (int seed = 0; seed < 100; ++seed) {
      const Tensor t = generate_signal(static_cast<std::uint64_t>(seed), shape, {});
      CHECK(t == generate_signal(static_cast<std::uint64_t>(seed), shape, {}));
      double last_peak = 0.0;
      for (std::int64_t y = 0; y < 5; ++y) {
        for (std::int64_t x = 0; x < 5; ++x) {
          last_peak = std::max(last_peak, t[static_cast<std::size_t>((2 * 5 + y) * 5 + x)]);
        }
      }
      CHECK(last_peak == Catch::Approx(1.0).margin(1e-12));
      for (double v : t.data()) CHECK(v >= 0.0);
    }
  }

  SECTION("growth=1 repeats the blob across channels") {
    SignalParams params;
    params.growth = 1.0;
    const Tensor t = generate_signal(5, shape, params);
    for (std::int64_t c = 1; c < 3; ++c) {
      for (std::int64_t i = 0; i < 25; ++i) {
        CHECK(t[static_cast<std::size_t>(c * 25 + i)] ==
              Catch::Approx(t[static_cast<std::size_t>(i)]).margin(1e-12));
      }
    }
  }

  SECTION("flat shapes work too") {
    const Tensor t = generate_signal(9, {6}, {});
    double peak = 0.0;
    for (double v : t.data()) {
      CHECK(v >= 0.0);
      peak = std::max(peak, v);
    }
    CHECK(peak == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("generate_scene_set shapes and determinism") {
  SimulateParams params;
  params.signal_count = 3;
  params.background_count = 2;
  params.eps_range = EpsRange{0.0, 2.0};
  const Shape shape{1, 4, 4};

  const SceneSet a = generate_scene_set(11, shape, params);
  const SceneSet b = generate_scene_set(11, shape, params);
  REQUIRE(a.signals.size() == 3);
  REQUIRE(a.backgrounds.size() == 2);
  CHECK(a.eps_range.lo == 0.0);
  CHECK(a.eps_range.hi == 2.0);
  for (std::size_t i = 0; i < a.signals.size(); ++i) CHECK(a.signals[i] == b.signals[i]);
  for (std::size_t i = 0; i < a.backgrounds.size(); ++i)
    CHECK(a.backgrounds[i] == b.backgrounds[i]);
  CHECK_FALSE(a.signals[0] == a.signals[1]);
}
