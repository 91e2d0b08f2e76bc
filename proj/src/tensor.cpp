#include "prvnet/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace prvnet {

std::int64_t shape_numel(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int d : shape) n *= d;
  return n;
}

std::string shape_to_string(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  for (int d : shape_) {
    if (d <= 0) throw std::invalid_argument("tensor dims must be positive, got " + shape_to_string(shape_));
  }
  if (shape_.size() > 4) throw std::invalid_argument("tensor rank > 4 unsupported: " + shape_to_string(shape_));
  data_.assign(static_cast<size_t>(shape_numel(shape_)), 0.0f);
}

Tensor::Tensor(std::vector<int> shape, std::vector<float> data) : shape_(std::move(shape)), data_(std::move(data)) {
  for (int d : shape_) {
    if (d <= 0) throw std::invalid_argument("tensor dims must be positive, got " + shape_to_string(shape_));
  }
  if (shape_.size() > 4) throw std::invalid_argument("tensor rank > 4 unsupported: " + shape_to_string(shape_));
  if (shape_numel(shape_) != static_cast<std::int64_t>(data_.size()))
    throw std::invalid_argument("tensor data size " + std::to_string(data_.size()) +
                                " does not match shape " + shape_to_string(shape_));
}

Tensor Tensor::scalar(float v) {
  Tensor t;
  t.shape_ = {};
  t.data_ = {v};
  return t;
}

float Tensor::scalar_value() const {
  if (numel() != 1)
    throw std::invalid_argument("scalar_value() on tensor of shape " + shape_str());
  return data_[0];
}

std::string Tensor::shape_str() const { return shape_to_string(shape_); }

MapMatF Tensor::mat(int rows, int cols) {
  if (static_cast<std::int64_t>(rows) * cols != numel())
    throw std::invalid_argument("mat(" + std::to_string(rows) + "," + std::to_string(cols) +
                                ") view does not cover tensor " + shape_str());
  return MapMatF(data_.data(), rows, cols);
}

ConstMapMatF Tensor::mat(int rows, int cols) const {
  if (static_cast<std::int64_t>(rows) * cols != numel())
    throw std::invalid_argument("mat(" + std::to_string(rows) + "," + std::to_string(cols) +
                                ") view does not cover tensor " + shape_str());
  return ConstMapMatF(data_.data(), rows, cols);
}

void Tensor::fill(float v) { std::fill(data_.begin(), data_.end(), v); }

}  // namespace prvnet
