// Signal planting and the synthetic scene generator.
//
// A scene is one (signal, background, intensity range) triple; planting
// combines them as background + eps * signal. The generators below stand in
// for a scene simulator: they only promise determinism and the documented
// range/normalization contracts, which is all the verification math uses.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "firecheck/rng.hpp"
#include "firecheck/tensor.hpp"

namespace firecheck {

struct EpsRange {
  double lo = 0.0;
  double hi = 1.0;
};

inline void check_eps_range(const EpsRange& r) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) throw std::invalid_argument("eps range must be finite");
  if (r.lo < 0.0) throw std::invalid_argument("eps range must be nonnegative");
  if (r.lo > r.hi) throw std::invalid_argument("eps range is empty: lo > hi");
}

struct Scene {
  Tensor signal;
  Tensor background;
  EpsRange eps_range;

  Scene(Tensor s, Tensor b, EpsRange range)
      : signal(std::move(s)), background(std::move(b)), eps_range(range) {
    if (!signal.same_shape(background)) {
      throw std::invalid_argument("scene signal shape " + shape_str(signal.shape()) +
                                  " does not match background shape " + shape_str(background.shape()));
    }
    check_eps_range(eps_range);
  }
};

struct SceneSet {
  std::vector<Tensor> signals;
  std::vector<Tensor> backgrounds;
  EpsRange eps_range;

  SceneSet(std::vector<Tensor> s, std::vector<Tensor> b, EpsRange range)
      : signals(std::move(s)), backgrounds(std::move(b)), eps_range(range) {
    if (signals.empty() || backgrounds.empty())
      throw std::invalid_argument("scene set needs at least one signal and one background");
    const Shape& shape = signals[0].shape();
    for (const auto& t : signals)
      if (t.shape() != shape) throw std::invalid_argument("scene set signals have mixed shapes");
    for (const auto& t : backgrounds)
      if (t.shape() != shape) throw std::invalid_argument("scene set backgrounds have mixed shapes");
    check_eps_range(eps_range);
  }

  Scene scene(std::size_t signal_idx, std::size_t background_idx) const {
    return Scene(signals.at(signal_idx), backgrounds.at(background_idx), eps_range);
  }
};

// background + eps * signal, elementwise.
inline Tensor plant(const Tensor& signal, const Tensor& background, double eps) {
  if (!signal.same_shape(background)) {
    throw std::invalid_argument("plant: signal shape " + shape_str(signal.shape()) +
                                " does not match background shape " + shape_str(background.shape()));
  }
  if (!std::isfinite(eps)) throw std::invalid_argument("plant: eps must be finite");
  std::vector<double> out(signal.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = background[i] + eps * signal[i];
  return Tensor(signal.shape(), std::move(out));
}

struct BackgroundParams {
  double smoothness = 2.0;  // box-filter half-width, in pixels
  double amplitude = 1.0;
};

struct SignalParams {
  std::optional<std::pair<double, double>> center;  // (row, col); seeded when absent
  double radius = 1.0;
  double growth = 1.5;  // per-time-step magnitude factor
};

namespace detail {

// Spatial view of a tensor shape: [k,h,w] as k channels, [n] as one channel row.
struct SpatialDims {
  std::int64_t channels, h, w;
};

inline SpatialDims spatial_dims(const Shape& shape) {
  if (shape.size() == 3) return {shape[0], shape[1], shape[2]};
  if (shape.size() == 1) return {1, 1, shape[0]};
  throw std::invalid_argument("generator expects a [k,h,w] or [n] shape, got " + shape_str(shape));
}

// Box average over a contiguous line; averages of in-bounds windows stay
// within the input hull.
inline void box_average_line(double* line, std::int64_t n, std::int64_t half) {
  if (half <= 0 || n <= 1) return;
  std::vector<double> src(line, line + n);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t a = std::max<std::int64_t>(0, i - half);
    const std::int64_t b = std::min<std::int64_t>(n - 1, i + half);
    double acc = 0.0;
    for (std::int64_t j = a; j <= b; ++j) acc += src[static_cast<std::size_t>(j)];
    line[i] = acc / static_cast<double>(b - a + 1);
  }
}

}  // namespace detail

// Deterministic smooth low-frequency field with values in [0, amplitude].
inline Tensor generate_background(std::uint64_t seed, const Shape& shape,
                                  const BackgroundParams& params = {}) {
  if (params.amplitude < 0.0 || !std::isfinite(params.amplitude))
    throw std::invalid_argument("background amplitude must be finite and nonnegative");
  const auto dims = detail::spatial_dims(shape);
  SplitMix64 seq(seed);
  Rng rng(seq.next());
  const auto n = static_cast<std::size_t>(shape_size(shape));
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform01();

  const auto half = static_cast<std::int64_t>(std::llround(std::max(0.0, params.smoothness)));
  // Average rows then columns within each channel; averages of [0,1) stay in [0,1).
  std::vector<double> col(static_cast<std::size_t>(dims.h));
  for (std::int64_t c = 0; c < dims.channels; ++c) {
    double* plane = v.data() + c * dims.h * dims.w;
    for (std::int64_t y = 0; y < dims.h; ++y) detail::box_average_line(plane + y * dims.w, dims.w, half);
    if (dims.h > 1) {
      for (std::int64_t x = 0; x < dims.w; ++x) {
        for (std::int64_t y = 0; y < dims.h; ++y) col[static_cast<std::size_t>(y)] = plane[y * dims.w + x];
        detail::box_average_line(col.data(), dims.h, half);
        for (std::int64_t y = 0; y < dims.h; ++y) plane[y * dims.w + x] = col[static_cast<std::size_t>(y)];
      }
    }
  }
  for (auto& x : v) x *= params.amplitude;
  return Tensor(shape, std::move(v));
}

// Deterministic nonnegative blob whose per-channel magnitude grows by the
// growth factor; the peak of the last channel is normalized to 1.
inline Tensor generate_signal(std::uint64_t seed, const Shape& shape, const SignalParams& params = {}) {
  if (!(params.radius > 0.0) || !std::isfinite(params.radius))
    throw std::invalid_argument("signal radius must be positive");
  if (!(params.growth > 0.0) || !std::isfinite(params.growth))
    throw std::invalid_argument("signal growth must be positive");
  const auto dims = detail::spatial_dims(shape);

  double cy, cx;
  if (params.center) {
    cy = params.center->first;
    cx = params.center->second;
    if (cy < 0.0 || cy > static_cast<double>(dims.h - 1) || cx < 0.0 || cx > static_cast<double>(dims.w - 1))
      throw std::invalid_argument("signal center lies outside the spatial bounds");
  } else {
    SplitMix64 seq(seed ^ 0x5167a1u);
    Rng rng(seq.next());
    cy = rng.uniform(0.0, static_cast<double>(dims.h - 1));
    cx = rng.uniform(0.0, static_cast<double>(dims.w - 1));
  }

  const double inv = 1.0 / (2.0 * params.radius * params.radius);
  std::vector<double> blob(static_cast<std::size_t>(dims.h * dims.w));
  double peak = 0.0;
  for (std::int64_t y = 0; y < dims.h; ++y) {
    for (std::int64_t x = 0; x < dims.w; ++x) {
      const double dy = static_cast<double>(y) - cy;
      const double dx = static_cast<double>(x) - cx;
      const double b = std::exp(-(dy * dy + dx * dx) * inv);
      blob[static_cast<std::size_t>(y * dims.w + x)] = b;
      peak = std::max(peak, b);
    }
  }
  if (peak <= 0.0) throw std::logic_error("signal blob degenerated to zero");

  std::vector<double> v(static_cast<std::size_t>(shape_size(shape)));
  for (std::int64_t c = 0; c < dims.channels; ++c) {
    // Last channel carries factor 1; earlier channels shrink by the growth factor.
    const double factor = std::pow(params.growth, static_cast<double>(c - (dims.channels - 1)));
    for (std::int64_t i = 0; i < dims.h * dims.w; ++i) {
      v[static_cast<std::size_t>(c * dims.h * dims.w + i)] = factor * blob[static_cast<std::size_t>(i)] / peak;
    }
  }
  return Tensor(shape, std::move(v));
}

// Convenience bundle used by the CLI's simulate command.
struct SimulateParams {
  std::int64_t signal_count = 1;
  std::int64_t background_count = 1;
  EpsRange eps_range;
  BackgroundParams background;
  SignalParams signal;
};

inline SceneSet generate_scene_set(std::uint64_t seed, const Shape& shape, const SimulateParams& params) {
  if (params.signal_count < 1 || params.background_count < 1)
    throw std::invalid_argument("scene set counts must be positive");
  SplitMix64 seq(seed);
  std::vector<Tensor> signals, backgrounds;
  signals.reserve(static_cast<std::size_t>(params.signal_count));
  backgrounds.reserve(static_cast<std::size_t>(params.background_count));
  for (std::int64_t i = 0; i < params.signal_count; ++i)
    signals.push_back(generate_signal(seq.next(), shape, params.signal));
  for (std::int64_t i = 0; i < params.background_count; ++i)
    backgrounds.push_back(generate_background(seq.next(), shape, params.background));
  return SceneSet(std::move(signals), std::move(backgrounds), params.eps_range);
}

}  // namespace firecheck
