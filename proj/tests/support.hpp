#pragma once

// Shared test support. The oracles here evaluate definitions directly and
// independently of the library implementation paths they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "epaae/tensor.hpp"

namespace testsupport {

// Central finite differences of f with respect to every entry of each
// parameter tensor. f must be a pure function of the current parameter
// values (rebuild the graph on every call, reseed any randomness).
inline std::vector<std::vector<double>> central_differences(
    const std::function<double()>& f, std::vector<epaae::Tensor> params,
    double h = 1e-5) {
  std::vector<std::vector<double>> grads;
  grads.reserve(params.size());
  for (epaae::Tensor& p : params) {
    std::vector<double> g(static_cast<size_t>(p.size()));
    auto vals = p.mutable_data();
    for (size_t i = 0; i < vals.size(); ++i) {
      const double keep = vals[i];
      vals[i] = keep + h;
      const double fp = f();
      vals[i] = keep - h;
      const double fm = f();
      vals[i] = keep;
      g[i] = (fp - fm) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

// max over entries of |a-f| / max(|a|, |f|, floor)
inline double max_rel_error(std::span<const double> analytic,
                            std::span<const double> numeric,
                            double floor = 1e-4) {
  double worst = 0.0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

}  // namespace testsupport
