#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace epaae {

using Shape = std::vector<int64_t>;

inline int64_t shape_size(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s);

namespace detail {

struct TensorData {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;

  int64_t size() const { return static_cast<int64_t>(value.size()); }

  std::vector<double>& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

// Dense real array with an optional gradient buffer. Value-semantics handle
// to shared storage; gradients accumulate in place during Graph::backward.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double v, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> data,
                     bool requires_grad = false);

  bool defined() const { return d_ != nullptr; }
  const Shape& shape() const { return d_->shape; }
  int rank() const { return static_cast<int>(d_->shape.size()); }
  int64_t dim(int i) const { return d_->shape[static_cast<size_t>(i)]; }
  int64_t size() const { return d_->size(); }

  std::span<const double> data() const { return d_->value; }
  std::span<double> mutable_data() { return d_->value; }

  bool requires_grad() const { return d_->requires_grad; }
  void set_requires_grad(bool b) { d_->requires_grad = b; }

  bool has_grad() const { return !d_->grad.empty(); }
  // Zero-filled if backward never reached this tensor.
  std::span<const double> grad() const {
    d_->ensure_grad();
    return d_->grad;
  }
  void zero_grad() const { d_->grad.clear(); }

  // Scalar convenience.
  double value() const {
    if (size() != 1) throw std::runtime_error("Tensor::value: not a scalar");
    return d_->value[0];
  }

  double at(int64_t i) const { return d_->value[static_cast<size_t>(i)]; }
  double at(int64_t r, int64_t c) const {
    return d_->value[static_cast<size_t>(r * d_->shape[1] + c)];
  }

  bool same_storage(const Tensor& o) const { return d_ == o.d_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorData> d) : d_(std::move(d)) {}
  std::shared_ptr<detail::TensorData> d_;
  friend class Graph;
  friend class Adam;
};

}  // namespace epaae
