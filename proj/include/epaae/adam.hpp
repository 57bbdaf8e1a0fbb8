#pragma once

#include <vector>

#include "epaae/tensor.hpp"

namespace epaae {

// Adam with bias correction. A missing gradient buffer counts as zero, so
// untouched parameters still decay their moments.
class Adam {
 public:
  Adam(std::vector<Tensor> params, double lr, double beta1 = 0.5,
       double beta2 = 0.999, double eps = 1e-8);

  void step();
  void zero_grad();
  int64_t steps_taken() const { return t_; }

 private:
  struct Slot {
    Tensor param;
    std::vector<double> m, v;
  };
  std::vector<Slot> slots_;
  double lr_, b1_, b2_, eps_;
  int64_t t_ = 0;
};

}  // namespace epaae
