#pragma once

#include <cstddef>
#include <vector>

namespace hycore::ad {

/// Dense row-major n-d array of doubles. Rank 0 (empty shape) is a scalar
/// with one element. This is a plain value type; differentiation state lives
/// on the Tape that consumed it.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> v;

  Tensor() = default;
  Tensor(std::vector<std::size_t> s, std::vector<double> data);

  static Tensor scalar(double x);
  static Tensor vector(std::vector<double> data);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Tensor zeros(const std::vector<std::size_t>& s);
  static Tensor zeros_like(const Tensor& t);

  std::size_t size() const { return v.size(); }
  std::size_t rank() const { return shape.size(); }
  bool is_scalar() const { return shape.empty(); }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool empty() const { return v.empty() && shape.empty(); }

  std::size_t rows() const { return shape.at(0); }
  std::size_t cols() const { return shape.at(1); }

  double item() const;                       // scalar value
  double& at(std::size_t r, std::size_t c);  // rank-2 access
  double at(std::size_t r, std::size_t c) const;

  bool all_finite() const;
};

/// Number of elements implied by a shape.
std::size_t shape_size(const std::vector<std::size_t>& s);

}  // namespace hycore::ad
