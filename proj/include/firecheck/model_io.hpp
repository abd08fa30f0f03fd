// JSON file formats: models, tensors, scene sets, boxes.
//
// Model files:   {"name": str, "input_shape": [ints], "layers": [layer objects]}
// Layer objects: {"type": "dense",   "weights": [[...]], "bias": [...]}
//                {"type": "conv2d",  "kernels": [[[[...]]]], "bias": [...], "stride": [sh, sw]}
//                {"type": "maxpool", "window": [ph, pw], "stride": [sh, sw]}
//                {"type": "relu"} | {"type": "sigmoid"}
// Tensors:       {"shape": [...], "data": [...]}
// Scene sets:    {"signals": [tensor...], "backgrounds": [tensor...], "eps_range": [lo, hi]}
// Boxes:         {"shape": [...], "lo": [...], "hi": [...]}
#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "firecheck/interval.hpp"
#include "firecheck/network.hpp"
#include "firecheck/planting.hpp"
#include "firecheck/tensor.hpp"

namespace firecheck {

using json = nlohmann::json;

inline json tensor_to_json(const Tensor& t) {
  return json{{"shape", t.shape()}, {"data", t.data()}};
}

inline Tensor tensor_from_json(const json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data"))
    throw std::invalid_argument("tensor JSON needs \"shape\" and \"data\"");
  return Tensor(j.at("shape").get<Shape>(), j.at("data").get<std::vector<double>>());
}

inline json layer_to_json(const Layer& layer) {
  struct Visitor {
    json operator()(const DenseLayer& d) const {
      return json{{"type", "dense"}, {"weights", d.weights}, {"bias", d.bias}};
    }
    json operator()(const Conv2dLayer& c) const {
      return json{{"type", "conv2d"},
                  {"kernels", c.kernels},
                  {"bias", c.bias},
                  {"stride", {c.stride_h, c.stride_w}}};
    }
    json operator()(const MaxPoolLayer& m) const {
      return json{{"type", "maxpool"},
                  {"window", {m.window_h, m.window_w}},
                  {"stride", {m.stride_h, m.stride_w}}};
    }
    json operator()(const ReluLayer&) const { return json{{"type", "relu"}}; }
    json operator()(const SigmoidLayer&) const { return json{{"type", "sigmoid"}}; }
  };
  return std::visit(Visitor{}, layer);
}

inline Layer layer_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "dense") {
    DenseLayer d;
    d.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    d.bias = j.at("bias").get<std::vector<double>>();
    return d;
  }
  if (type == "conv2d") {
    Conv2dLayer c;
    c.kernels = j.at("kernels").get<std::vector<std::vector<std::vector<std::vector<double>>>>>();
    c.bias = j.at("bias").get<std::vector<double>>();
    if (j.contains("stride")) {
      const auto s = j.at("stride").get<std::vector<std::int64_t>>();
      if (s.size() != 2) throw std::invalid_argument("conv2d stride must be [sh, sw]");
      c.stride_h = s[0];
      c.stride_w = s[1];
    }
    return c;
  }
  if (type == "maxpool") {
    MaxPoolLayer m;
    const auto w = j.at("window").get<std::vector<std::int64_t>>();
    if (w.size() != 2) throw std::invalid_argument("maxpool window must be [ph, pw]");
    m.window_h = w[0];
    m.window_w = w[1];
    if (j.contains("stride")) {
      const auto s = j.at("stride").get<std::vector<std::int64_t>>();
      if (s.size() != 2) throw std::invalid_argument("maxpool stride must be [sh, sw]");
      m.stride_h = s[0];
      m.stride_w = s[1];
    } else {
      m.stride_h = m.window_h;
      m.stride_w = m.window_w;
    }
    return m;
  }
  if (type == "relu") return ReluLayer{};
  if (type == "sigmoid") return SigmoidLayer{};
  throw std::invalid_argument("unknown layer type \"" + type + "\"");
}

inline json network_to_json(const Network& net) {
  json layers = json::array();
  for (const auto& layer : net.layers) layers.push_back(layer_to_json(layer));
  return json{{"name", net.name}, {"input_shape", net.input_shape}, {"layers", layers}};
}

inline Network network_from_json(const json& j) {
  Network net;
  net.name = j.value("name", "");
  net.input_shape = j.at("input_shape").get<Shape>();
  for (const auto& lj : j.at("layers")) net.layers.push_back(layer_from_json(lj));
  return net;
}

inline json scene_set_to_json(const SceneSet& set) {
  json signals = json::array(), backgrounds = json::array();
  for (const auto& t : set.signals) signals.push_back(tensor_to_json(t));
  for (const auto& t : set.backgrounds) backgrounds.push_back(tensor_to_json(t));
  return json{{"signals", signals},
              {"backgrounds", backgrounds},
              {"eps_range", {set.eps_range.lo, set.eps_range.hi}}};
}

inline SceneSet scene_set_from_json(const json& j) {
  std::vector<Tensor> signals, backgrounds;
  for (const auto& tj : j.at("signals")) signals.push_back(tensor_from_json(tj));
  for (const auto& tj : j.at("backgrounds")) backgrounds.push_back(tensor_from_json(tj));
  const auto range = j.at("eps_range").get<std::vector<double>>();
  if (range.size() != 2) throw std::invalid_argument("eps_range must be [lo, hi]");
  return SceneSet(std::move(signals), std::move(backgrounds), EpsRange{range[0], range[1]});
}

inline json box_to_json(const Box& box) {
  std::vector<double> lo(box.size()), hi(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    lo[i] = box[i].lo;
    hi[i] = box[i].hi;
  }
  return json{{"shape", box.shape()}, {"lo", lo}, {"hi", hi}};
}

inline Box box_from_json(const json& j) {
  const auto shape = j.at("shape").get<Shape>();
  const auto lo = j.at("lo").get<std::vector<double>>();
  const auto hi = j.at("hi").get<std::vector<double>>();
  if (lo.size() != hi.size()) throw std::invalid_argument("box lo/hi lists differ in length");
  std::vector<Interval> dims;
  dims.reserve(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) dims.emplace_back(lo[i], hi[i]);
  return Box(shape, std::move(dims));
}

namespace detail {

inline json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + " file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string(what) + " file " + path + " is not valid JSON: " + e.what());
  }
  return j;
}

inline void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace detail

inline Network load_network(const std::string& path) {
  try {
    return network_from_json(detail::load_json_file(path, "model"));
  } catch (const json::exception& e) {
    throw std::runtime_error("model file " + path + ": " + e.what());
  }
}

inline void save_network(const std::string& path, const Network& net) {
  detail::save_json_file(path, network_to_json(net));
}

inline Tensor load_tensor(const std::string& path) {
  try {
    return tensor_from_json(detail::load_json_file(path, "tensor"));
  } catch (const json::exception& e) {
    throw std::runtime_error("tensor file " + path + ": " + e.what());
  }
}

inline void save_tensor(const std::string& path, const Tensor& t) {
  detail::save_json_file(path, tensor_to_json(t));
}

inline SceneSet load_scene_set(const std::string& path) {
  try {
    return scene_set_from_json(detail::load_json_file(path, "scene set"));
  } catch (const json::exception& e) {
    throw std::runtime_error("scene set file " + path + ": " + e.what());
  }
}

inline void save_scene_set(const std::string& path, const SceneSet& set) {
  detail::save_json_file(path, scene_set_to_json(set));
}

inline Box load_box(const std::string& path) {
  try {
    return box_from_json(detail::load_json_file(path, "box"));
  } catch (const json::exception& e) {
    throw std::runtime_error("box file " + path + ": " + e.what());
  }
}

inline void save_box(const std::string& path, const Box& box) {
  detail::save_json_file(path, box_to_json(box));
}

}  // namespace firecheck
