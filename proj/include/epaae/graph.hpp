#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "epaae/tensor.hpp"

namespace epaae {

// Tape of executed primitives. Ops record a backward closure whenever an
// input requires grad; backward() replays the tape once in reverse and
// accumulates gradients on every reachable leaf. Single-threaded; one tape
// per training context.
class Graph {
 public:
  // recording=false turns the tape off entirely (inference).
  explicit Graph(bool recording = true) : recording_(recording) {}

  Tensor matmul(const Tensor& a, const Tensor& b);

  // Elementwise; rhs may broadcast as a row vector (n) against (m,n) or as
  // a column (m,1) against (m,n).
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);

  Tensor scale(const Tensor& a, double c);

  Tensor concat(const std::vector<Tensor>& parts, int axis);

  // Embedding lookup: table (V,E), ids in [0,V) -> (ids.size(), E).
  Tensor gather_rows(const Tensor& table, std::span<const int32_t> ids);

  Tensor tanh(const Tensor& a);
  Tensor sigmoid(const Tensor& a);
  Tensor exp(const Tensor& a);
  Tensor log(const Tensor& a);
  // sqrt'(0) defined as 0 so zero-norm rows propagate a clean zero.
  Tensor sqrt(const Tensor& a);
  Tensor clamp(const Tensor& a, double lo, double hi);

  Tensor sum(const Tensor& a);             // all elements -> scalar
  Tensor sum_axis(const Tensor& a, int axis);  // rank-2 only
  Tensor mean(const Tensor& a);            // all elements -> scalar

  Tensor reshape(const Tensor& a, Shape shape);

  // Fused stable softmax + NLL, meaned over rows whose target != ignore_id.
  Tensor softmax_cross_entropy(const Tensor& logits,
                               std::span<const int32_t> targets,
                               int32_t ignore_id = -1);

  // Populates grads of every requires-grad leaf reachable from loss.
  // The tape is consumed; a second call throws.
  void backward(const Tensor& loss);

  size_t node_count() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

 private:
  Tensor make(Shape shape, std::vector<double> value, bool requires_grad,
              const char* op);
  void record(std::function<void()> fn) { nodes_.push_back(std::move(fn)); }
  bool track(const Tensor& t) const { return recording_ && t.d_->requires_grad; }

  std::vector<std::function<void()>> nodes_;
  bool recording_ = true;
  bool consumed_ = false;
};

}  // namespace epaae
