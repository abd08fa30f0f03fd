// Dense shape-tagged tensors of 64-bit floats, row-major.
#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace firecheck {

using Shape = std::vector<std::int64_t>;

inline std::int64_t shape_size(const Shape& shape) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

inline std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

class Tensor {
 public:
  Tensor() = default;

  Tensor(Shape shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    for (auto d : shape_) {
      if (d <= 0) throw std::invalid_argument("tensor dimension must be positive, got " + shape_str(shape_));
    }
    if (shape_size(shape_) != static_cast<std::int64_t>(data_.size())) {
      throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                  " does not match shape " + shape_str(shape_));
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw std::invalid_argument("tensor values must be finite");
    }
  }

  static Tensor zeros(Shape shape) {
    auto n = shape_size(shape);
    return Tensor(std::move(shape), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  }

  static Tensor constant(Shape shape, double value) {
    auto n = shape_size(shape);
    return Tensor(std::move(shape), std::vector<double>(static_cast<std::size_t>(n), value));
  }

  const Shape& shape() const { return shape_; }
  const std::vector<double>& data() const { return data_; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  double operator[](std::size_t i) const { return data_[i]; }
  double at(std::size_t i) const { return data_.at(i); }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace firecheck
