#include "epaae/graph.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace epaae {

namespace {

using MatMap = Eigen::Map<
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatMap = Eigen::Map<
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  std::ostringstream os;
  os << op << ": shape mismatch " << shape_str(a) << " vs " << shape_str(b);
  throw std::runtime_error(os.str());
}

enum class Broadcast { kNone, kRow, kCol };

Broadcast broadcast_kind(const char* op, const Shape& a, const Shape& b) {
  if (a == b) return Broadcast::kNone;
  if (a.size() == 2 && b.size() == 1 && b[0] == a[1]) return Broadcast::kRow;
  if (a.size() == 2 && b.size() == 2 && b[0] == a[0] && b[1] == 1)
    return Broadcast::kCol;
  shape_error(op, a, b);
}

// Folds an (m,n) gradient back onto the broadcast rhs.
void reduce_into(Broadcast bc, const Shape& a_shape,
                 const std::vector<double>& g, std::vector<double>& out,
                 double sign) {
  const int64_t m = a_shape[0];
  const int64_t n = a_shape[1];
  if (bc == Broadcast::kRow) {
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < n; ++j) out[j] += sign * g[i * n + j];
  } else {
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < n; ++j) out[i] += sign * g[i * n + j];
  }
}

}  // namespace

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << ')';
  return os.str();
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  auto d = std::make_shared<detail::TensorData>();
  d->value.assign(static_cast<size_t>(shape_size(shape)), 0.0);
  d->shape = std::move(shape);
  d->requires_grad = requires_grad;
  return Tensor(std::move(d));
}

Tensor Tensor::full(Shape shape, double v, bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  std::fill(t.d_->value.begin(), t.d_->value.end(), v);
  return t;
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return full({}, v, requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> data, bool requires_grad) {
  if (shape_size(shape) != static_cast<int64_t>(data.size()))
    throw std::runtime_error("Tensor::from: data length does not match shape " +
                             shape_str(shape));
  auto d = std::make_shared<detail::TensorData>();
  d->shape = std::move(shape);
  d->value = std::move(data);
  d->requires_grad = requires_grad;
  return Tensor(std::move(d));
}

Tensor Graph::make(Shape shape, std::vector<double> value, bool requires_grad,
                   const char* op) {
  for (double v : value) {
    if (!std::isfinite(v))
      throw std::runtime_error(std::string(op) + ": non-finite output");
  }
  auto d = std::make_shared<detail::TensorData>();
  d->shape = std::move(shape);
  d->value = std::move(value);
  d->requires_grad = requires_grad && recording_;
  return Tensor(std::move(d));
}

Tensor Graph::matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    shape_error("matmul", a.shape(), b.shape());
  const int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(static_cast<size_t>(m * n));
  {
    ConstMatMap A(a.data().data(), m, k), B(b.data().data(), k, n);
    MatMap C(out.data(), m, n);
    C.noalias() = A * B;
  }
  bool rg = track(a) || track(b);
  Tensor res = make({m, n}, std::move(out), rg, "matmul");
  if (rg) {
    auto ad = a.d_, bd = b.d_, od = res.d_;
    record([ad, bd, od, m, k, n]() {
      if (od->grad.empty()) return;
      ConstMatMap G(od->grad.data(), m, n);
      if (ad->requires_grad) {
        ConstMatMap B(bd->value.data(), k, n);
        MatMap dA(ad->ensure_grad().data(), m, k);
        dA.noalias() += G * B.transpose();
      }
      if (bd->requires_grad) {
        ConstMatMap A(ad->value.data(), m, k);
        MatMap dB(bd->ensure_grad().data(), k, n);
        dB.noalias() += A.transpose() * G;
      }
    });
  }
  return res;
}

Tensor Graph::add(const Tensor& a, const Tensor& b) {
  Broadcast bc = broadcast_kind("add", a.shape(), b.shape());
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<double> out(av.size());
  if (bc == Broadcast::kNone) {
    for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  } else if (bc == Broadcast::kRow) {
    const int64_t n = a.dim(1);
    for (size_t i = 0; i < out.size(); ++i)
      out[i] = av[i] + bv[static_cast<size_t>(i % static_cast<size_t>(n))];
  } else {
    const int64_t n = a.dim(1);
    for (size_t i = 0; i < out.size(); ++i)
      out[i] = av[i] + bv[i / static_cast<size_t>(n)];
  }
  bool rg = track(a) || track(b);
  Tensor res = make(a.shape(), std::move(out), rg, "add");
  if (rg) {
    auto ad = a.d_, bd = b.d_, od = res.d_;
    Shape ash = a.shape();
    record([ad, bd, od, bc, ash]() {
      if (od->grad.empty()) return;
      if (ad->requires_grad) {
        auto& ga = ad->ensure_grad();
        for (size_t i = 0; i < ga.size(); ++i) ga[i] += od->grad[i];
      }
      if (bd->requires_grad) {
        auto& gb = bd->ensure_grad();
        if (bc == Broadcast::kNone) {
          for (size_t i = 0; i < gb.size(); ++i) gb[i] += od->grad[i];
        } else {
          reduce_into(bc, ash, od->grad, gb, 1.0);
        }
      }
    });
  }
  return res;
}

Tensor Graph::sub(const Tensor& a, const Tensor& b) {
  Broadcast bc = broadcast_kind("sub", a.shape(), b.shape());
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<double> out(av.size());
  if (bc == Broadcast::kNone) {
    for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  } else if (bc == Broadcast::kRow) {
    const int64_t n = a.dim(1);
    for (size_t i = 0; i < out.size(); ++i)
      out[i] = av[i] - bv[static_cast<size_t>(i % static_cast<size_t>(n))];
  } else {
    const int64_t n = a.dim(1);
    for (size_t i = 0; i < out.size(); ++i)
      out[i] = av[i] - bv[i / static_cast<size_t>(n)];
  }
  bool rg = track(a) || track(b);
  Tensor res = make(a.shape(), std::move(out), rg, "sub");
  if (rg) {
    auto ad = a.d_, bd = b.d_, od = res.d_;
    Shape ash = a.shape();
    record([ad, bd, od, bc, ash]() {
      if (od->grad.empty()) return;
      if (ad->requires_grad) {
        auto& ga = ad->ensure_grad();
        for (size_t i = 0; i < ga.size(); ++i) ga[i] += od->grad[i];
      }
      if (bd->requires_grad) {
        auto& gb = bd->ensure_grad();
        if (bc == Broadcast::kNone) {
          for (size_t i = 0; i < gb.size(); ++i) gb[i] -= od->grad[i];
        } else {
          reduce_into(bc, ash, od->grad, gb, -1.0);
        }
      }
    });
  }
  return res;
}

Tensor Graph::mul(const Tensor& a, const Tensor& b) {
  Broadcast bc = broadcast_kind("mul", a.shape(), b.shape());
  const auto av = a.data();
  const auto bv = b.data();
  const int64_t n = a.rank() == 2 ? a.dim(1) : 0;
  auto b_at = [&](size_t i) -> double {
    if (bc == Broadcast::kNone) return bv[i];
    if (bc == Broadcast::kRow) return bv[i % static_cast<size_t>(n)];
    return bv[i / static_cast<size_t>(n)];
  };
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] * b_at(i);
  bool rg = track(a) || track(b);
  Tensor res = make(a.shape(), std::move(out), rg, "mul");
  if (rg) {
    auto ad = a.d_, bd = b.d_, od = res.d_;
    Shape ash = a.shape();
    record([ad, bd, od, bc, ash, n]() {
      if (od->grad.empty()) return;
      const auto& g = od->grad;
      if (ad->requires_grad) {
        auto& ga = ad->ensure_grad();
        for (size_t i = 0; i < ga.size(); ++i) {
          double bvi = bc == Broadcast::kNone ? bd->value[i]
                       : bc == Broadcast::kRow
                           ? bd->value[i % static_cast<size_t>(n)]
                           : bd->value[i / static_cast<size_t>(n)];
          ga[i] += g[i] * bvi;
        }
      }
      if (bd->requires_grad) {
        auto& gb = bd->ensure_grad();
        if (bc == Broadcast::kNone) {
          for (size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * ad->value[i];
        } else if (bc == Broadcast::kRow) {
          const int64_t m = ash[0];
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < n; ++j)
              gb[static_cast<size_t>(j)] +=
                  g[static_cast<size_t>(i * n + j)] *
                  ad->value[static_cast<size_t>(i * n + j)];
        } else {
          const int64_t m = ash[0];
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < n; ++j)
              gb[static_cast<size_t>(i)] +=
                  g[static_cast<size_t>(i * n + j)] *
                  ad->value[static_cast<size_t>(i * n + j)];
        }
      }
    });
  }
  return res;
}

Tensor Graph::scale(const Tensor& a, double c) {
  const auto av = a.data();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] * c;
  bool rg = track(a);
  Tensor res = make(a.shape(), std::move(out), rg, "scale");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od, c]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += od->grad[i] * c;
    });
  }
  return res;
}

Tensor Graph::concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw std::runtime_error("concat: no inputs");
  if (axis != 0 && axis != 1) throw std::runtime_error("concat: axis must be 0 or 1");
  const int64_t other = axis == 0 ? parts[0].dim(1) : parts[0].dim(0);
  int64_t total = 0;
  bool rg = false;
  for (const Tensor& p : parts) {
    if (p.rank() != 2 || (axis == 0 ? p.dim(1) : p.dim(0)) != other)
      shape_error("concat", parts[0].shape(), p.shape());
    total += axis == 0 ? p.dim(0) : p.dim(1);
    rg = rg || track(p);
  }
  Shape out_shape = axis == 0 ? Shape{total, other} : Shape{other, total};
  std::vector<double> out(static_cast<size_t>(shape_size(out_shape)));
  if (axis == 0) {
    size_t off = 0;
    for (const Tensor& p : parts) {
      std::copy(p.data().begin(), p.data().end(), out.begin() + off);
      off += p.data().size();
    }
  } else {
    const int64_t rows = other;
    int64_t col_off = 0;
    for (const Tensor& p : parts) {
      const int64_t pc = p.dim(1);
      for (int64_t i = 0; i < rows; ++i)
        for (int64_t j = 0; j < pc; ++j)
          out[static_cast<size_t>(i * total + col_off + j)] = p.at(i, j);
      col_off += pc;
    }
  }
  Tensor res = make(std::move(out_shape), std::move(out), rg, "concat");
  if (rg) {
    std::vector<std::shared_ptr<detail::TensorData>> ins;
    ins.reserve(parts.size());
    for (const Tensor& p : parts) ins.push_back(p.d_);
    auto od = res.d_;
    record([ins, od, axis, total, other]() {
      if (od->grad.empty()) return;
      if (axis == 0) {
        size_t off = 0;
        for (auto& in : ins) {
          if (in->requires_grad) {
            auto& gi = in->ensure_grad();
            for (size_t i = 0; i < gi.size(); ++i) gi[i] += od->grad[off + i];
          }
          off += in->value.size();
        }
      } else {
        int64_t col_off = 0;
        for (auto& in : ins) {
          const int64_t pc = in->shape[1];
          if (in->requires_grad) {
            auto& gi = in->ensure_grad();
            for (int64_t i = 0; i < other; ++i)
              for (int64_t j = 0; j < pc; ++j)
                gi[static_cast<size_t>(i * pc + j)] +=
                    od->grad[static_cast<size_t>(i * total + col_off + j)];
          }
          col_off += pc;
        }
      }
    });
  }
  return res;
}

Tensor Graph::gather_rows(const Tensor& table, std::span<const int32_t> ids) {
  if (table.rank() != 2) shape_error("gather_rows", table.shape(), {});
  const int64_t v = table.dim(0), e = table.dim(1);
  std::vector<double> out(ids.size() * static_cast<size_t>(e));
  for (size_t i = 0; i < ids.size(); ++i) {
    int32_t id = ids[i];
    if (id < 0 || id >= v)
      throw std::runtime_error("gather_rows: id out of range");
    std::copy_n(table.data().data() + static_cast<size_t>(id) * e,
                static_cast<size_t>(e), out.data() + i * static_cast<size_t>(e));
  }
  bool rg = track(table);
  Tensor res = make({static_cast<int64_t>(ids.size()), e}, std::move(out), rg,
                    "gather_rows");
  if (rg) {
    auto td = table.d_, od = res.d_;
    std::vector<int32_t> idv(ids.begin(), ids.end());
    record([td, od, idv, e]() {
      if (od->grad.empty()) return;
      auto& gt = td->ensure_grad();
      for (size_t i = 0; i < idv.size(); ++i)
        for (int64_t j = 0; j < e; ++j)
          gt[static_cast<size_t>(idv[i]) * static_cast<size_t>(e) +
             static_cast<size_t>(j)] +=
              od->grad[i * static_cast<size_t>(e) + static_cast<size_t>(j)];
    });
  }
  return res;
}

Tensor Graph::tanh(const Tensor& a) {
  const auto av = a.data();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(av[i]);
  bool rg = track(a);
  Tensor res = make(a.shape(), std::move(out), rg, "tanh");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) {
        double y = od->value[i];
        ga[i] += od->grad[i] * (1.0 - y * y);
      }
    });
  }
  return res;
}

Tensor Graph::sigmoid(const Tensor& a) {
  const auto av = a.data();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = stable_sigmoid(av[i]);
  bool rg = track(a);
  Tensor res = make(a.shape(), std::move(out), rg, "sigmoid");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) {
        double y = od->value[i];
        ga[i] += od->grad[i] * y * (1.0 - y);
      }
    });
  }
  return res;
}

Tensor Graph::exp(const Tensor& a) {
  const auto av = a.data();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::exp(av[i]);
  bool rg = track(a);
  Tensor res = make(a.shape(), std::move(out), rg, "exp");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += od->grad[i] * od->value[i];
    });
  }
  return res;
}

Tensor Graph::log(const Tensor& a) {
  const auto av = a.data();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::log(av[i]);
  bool rg = track(a);
  Tensor res = make(a.shape(), std::move(out), rg, "log");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += od->grad[i] / ad->value[i];
    });
  }
  return res;
}

Tensor Graph::sqrt(const Tensor& a) {
  const auto av = a.data();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(av[i]);
  bool rg = track(a);
  Tensor res = make(a.shape(), std::move(out), rg, "sqrt");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) {
        double y = od->value[i];
        if (y > 0.0) ga[i] += od->grad[i] * 0.5 / y;
      }
    });
  }
  return res;
}

Tensor Graph::clamp(const Tensor& a, double lo, double hi) {
  const auto av = a.data();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(av[i], lo, hi);
  bool rg = track(a);
  Tensor res = make(a.shape(), std::move(out), rg, "clamp");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od, lo, hi]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) {
        double x = ad->value[i];
        if (x > lo && x < hi) ga[i] += od->grad[i];
      }
    });
  }
  return res;
}

Tensor Graph::sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  bool rg = track(a);
  Tensor res = make({}, {s}, rg, "sum");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += od->grad[0];
    });
  }
  return res;
}

Tensor Graph::sum_axis(const Tensor& a, int axis) {
  if (a.rank() != 2 || (axis != 0 && axis != 1))
    throw std::runtime_error("sum_axis: rank-2 tensor and axis 0/1 required");
  const int64_t m = a.dim(0), n = a.dim(1);
  std::vector<double> out(static_cast<size_t>(axis == 0 ? n : m), 0.0);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j)
      out[static_cast<size_t>(axis == 0 ? j : i)] += a.at(i, j);
  bool rg = track(a);
  Tensor res = make({axis == 0 ? n : m}, std::move(out), rg, "sum_axis");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od, m, n, axis]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j)
          ga[static_cast<size_t>(i * n + j)] +=
              od->grad[static_cast<size_t>(axis == 0 ? j : i)];
    });
  }
  return res;
}

Tensor Graph::mean(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  const double inv = 1.0 / static_cast<double>(a.size());
  bool rg = track(a);
  Tensor res = make({}, {s * inv}, rg, "mean");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od, inv]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += od->grad[0] * inv;
    });
  }
  return res;
}

Tensor Graph::reshape(const Tensor& a, Shape shape) {
  if (shape_size(shape) != a.size())
    shape_error("reshape", a.shape(), shape);
  std::vector<double> out(a.data().begin(), a.data().end());
  bool rg = track(a);
  Tensor res = make(std::move(shape), std::move(out), rg, "reshape");
  if (rg) {
    auto ad = a.d_, od = res.d_;
    record([ad, od]() {
      if (od->grad.empty()) return;
      auto& ga = ad->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += od->grad[i];
    });
  }
  return res;
}

Tensor Graph::softmax_cross_entropy(const Tensor& logits,
                                    std::span<const int32_t> targets,
                                    int32_t ignore_id) {
  if (logits.rank() != 2 ||
      logits.dim(0) != static_cast<int64_t>(targets.size()))
    throw std::runtime_error("softmax_cross_entropy: logits " +
                             shape_str(logits.shape()) + " vs " +
                             std::to_string(targets.size()) + " targets");
  const int64_t n = logits.dim(0), v = logits.dim(1);
  std::vector<double> probs(static_cast<size_t>(n * v));
  double loss = 0.0;
  int64_t n_valid = 0;
  for (int64_t i = 0; i < n; ++i) {
    const double* row = logits.data().data() + i * v;
    double* prow = probs.data() + i * v;
    int32_t t = targets[static_cast<size_t>(i)];
    if (t == ignore_id) continue;
    if (t < 0 || t >= v)
      throw std::runtime_error("softmax_cross_entropy: target out of range");
    double mx = row[0];
    for (int64_t j = 1; j < v; ++j) mx = std::max(mx, row[j]);
    double lse = 0.0;
    for (int64_t j = 0; j < v; ++j) lse += std::exp(row[j] - mx);
    lse = std::log(lse) + mx;
    for (int64_t j = 0; j < v; ++j) prow[j] = std::exp(row[j] - lse);
    loss += lse - row[t];
    ++n_valid;
  }
  if (n_valid > 0) loss /= static_cast<double>(n_valid);
  bool rg = track(logits);
  Tensor res = make({}, {loss}, rg, "softmax_cross_entropy");
  if (rg) {
    auto ld = logits.d_, od = res.d_;
    std::vector<int32_t> tv(targets.begin(), targets.end());
    record([ld, od, probs = std::move(probs), tv = std::move(tv), ignore_id, n,
            v, n_valid]() {
      if (od->grad.empty() || n_valid == 0) return;
      const double g = od->grad[0] / static_cast<double>(n_valid);
      auto& gl = ld->ensure_grad();
      for (int64_t i = 0; i < n; ++i) {
        int32_t t = tv[static_cast<size_t>(i)];
        if (t == ignore_id) continue;
        for (int64_t j = 0; j < v; ++j)
          gl[static_cast<size_t>(i * v + j)] +=
              g * (probs[static_cast<size_t>(i * v + j)] - (j == t ? 1.0 : 0.0));
      }
    });
  }
  return res;
}

void Graph::backward(const Tensor& loss) {
  if (consumed_) throw std::runtime_error("backward: graph already consumed");
  if (!loss.defined() || loss.size() != 1)
    throw std::runtime_error("backward: loss must be a scalar");
  consumed_ = true;
  loss.d_->ensure_grad()[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
  nodes_.clear();
}

}  // namespace epaae
