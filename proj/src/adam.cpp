#include "epaae/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace epaae {

Adam::Adam(std::vector<Tensor> params, double lr, double beta1, double beta2,
           double eps)
    : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
  if (lr <= 0.0) throw std::runtime_error("Adam: lr must be positive");
  slots_.reserve(params.size());
  for (Tensor& p : params) {
    Slot s;
    s.m.assign(static_cast<size_t>(p.size()), 0.0);
    s.v.assign(static_cast<size_t>(p.size()), 0.0);
    s.param = std::move(p);
    slots_.push_back(std::move(s));
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (Slot& s : slots_) {
    auto vals = s.param.mutable_data();
    const bool has_g = s.param.has_grad();
    auto g = s.param.grad();
    for (size_t i = 0; i < vals.size(); ++i) {
      const double gi = has_g ? g[i] : 0.0;
      s.m[i] = b1_ * s.m[i] + (1.0 - b1_) * gi;
      s.v[i] = b2_ * s.v[i] + (1.0 - b2_) * gi * gi;
      const double mhat = s.m[i] / c1;
      const double vhat = s.v[i] / c2;
      vals[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

void Adam::zero_grad() {
  for (Slot& s : slots_) s.param.zero_grad();
}

}  // namespace epaae
