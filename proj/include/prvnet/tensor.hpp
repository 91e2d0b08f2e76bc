#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace prvnet {

using MatF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMatF = Eigen::Map<MatF>;
using ConstMapMatF = Eigen::Map<const MatF>;
using MapArrF = Eigen::Map<Eigen::ArrayXf>;
using ConstMapArrF = Eigen::Map<const Eigen::ArrayXf>;

// Dense row-major f32 tensor, rank 0..4. Rank 0 is a scalar holding one value.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);  // zero-filled
  Tensor(std::vector<int> shape, std::vector<float> data);

  static Tensor scalar(float v);
  static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_); }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  float& at(std::int64_t i) { return data_[static_cast<size_t>(i)]; }
  float at(std::int64_t i) const { return data_[static_cast<size_t>(i)]; }
  float scalar_value() const;

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  std::string shape_str() const;

  // Flat views; mat() requires rows*cols == numel().
  MapMatF mat(int rows, int cols);
  ConstMapMatF mat(int rows, int cols) const;
  MapArrF arr() { return MapArrF(data_.data(), numel()); }
  ConstMapArrF arr() const { return ConstMapArrF(data_.data(), numel()); }

  void fill(float v);

 private:
  std::vector<int> shape_;
  std::vector<float> data_;
};

std::string shape_to_string(const std::vector<int>& shape);
std::int64_t shape_numel(const std::vector<int>& shape);

}  // namespace prvnet
