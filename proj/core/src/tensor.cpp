#include "hycore/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace hycore::ad {

std::size_t shape_size(const std::vector<std::size_t>& s) {
  std::size_t n = 1;
  for (auto e : s) n *= e;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> data)
    : shape(std::move(s)), v(std::move(data)) {
  if (v.size() != shape_size(shape))
    throw std::invalid_argument("Tensor: data length does not match shape");
}

Tensor Tensor::scalar(double x) { return Tensor({}, {x}); }

Tensor Tensor::vector(std::vector<double> data) {
  const std::size_t n = data.size();
  return Tensor({n}, std::move(data));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
  return Tensor({rows, cols}, std::move(data));
}

Tensor Tensor::zeros(const std::vector<std::size_t>& s) {
  return Tensor(s, std::vector<double>(shape_size(s), 0.0));
}

Tensor Tensor::zeros_like(const Tensor& t) { return zeros(t.shape); }

double Tensor::item() const {
  if (!is_scalar()) throw std::invalid_argument("Tensor::item: not a scalar");
  return v[0];
}

double& Tensor::at(std::size_t r, std::size_t c) { return v[r * cols() + c]; }
double Tensor::at(std::size_t r, std::size_t c) const { return v[r * cols() + c]; }

bool Tensor::all_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace hycore::ad
