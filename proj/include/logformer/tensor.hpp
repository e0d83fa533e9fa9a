// Copyright 2026 The logformer-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense rank-2 tensors with tape-based reverse-mode differentiation.
//
// Every Tensor is a handle onto a shared Node holding its value, optional
// gradient and (for op outputs) the inputs plus a backward closure. The tape
// is the DAG reachable from a loss; backward() orders it topologically and
// runs each closure exactly once. Leaves (parameters) outlive the tape and
// accumulate gradients additively until cleared.
//
// Only the op set the model needs is provided. Broadcasting is limited to a
// 1 x n row added to every row of an m x n matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "logformer/error.hpp"

namespace logformer {

/// Row mask: 1 marks a real position, 0 a padded one.
using Mask = std::vector<std::uint8_t>;

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  constexpr std::size_t size() const noexcept { return rows * cols; }
  friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(Shape s) {
  return "[" + std::to_string(s.rows) + "x" + std::to_string(s.cols) + "]";
}

namespace detail {

inline bool& grad_mode_flag() {
  thread_local bool enabled = true;
  return enabled;
}

template <class Real>
struct Node {
  Shape shape;
  std::vector<Real> value;
  std::vector<Real> grad;  // empty == absent
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), Real(0));
  }
};

}  // namespace detail

/// Disables tape recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard() : previous_(detail::grad_mode_flag()) { detail::grad_mode_flag() = false; }
  ~NoGradGuard() { detail::grad_mode_flag() = previous_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

inline bool grad_enabled() { return detail::grad_mode_flag(); }

template <class Real>
class Tensor {
 public:
  using value_type = Real;
  using NodeType = detail::Node<Real>;

  Tensor() = default;

  static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false) {
    return from_vector(rows, cols, std::vector<Real>(rows * cols, Real(0)), requires_grad);
  }

  static Tensor full(std::size_t rows, std::size_t cols, Real v, bool requires_grad = false) {
    return from_vector(rows, cols, std::vector<Real>(rows * cols, v), requires_grad);
  }

  static Tensor from_vector(std::size_t rows, std::size_t cols, std::vector<Real> data,
                            bool requires_grad = false) {
    if (rows == 0 || cols == 0) {
      throw RuntimeError("tensor dimensions must be positive, got " +
                         to_string(Shape{rows, cols}));
    }
    if (data.size() != rows * cols) {
      throw RuntimeError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + to_string(Shape{rows, cols}));
    }
    auto node = std::make_shared<NodeType>();
    node->shape = {rows, cols};
    node->value = std::move(data);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
  }

  static Tensor scalar(Real v, bool requires_grad = false) {
    return from_vector(1, 1, {v}, requires_grad);
  }

  bool defined() const noexcept { return static_cast<bool>(node_); }
  Shape shape() const noexcept { return node_->shape; }
  std::size_t rows() const noexcept { return node_->shape.rows; }
  std::size_t cols() const noexcept { return node_->shape.cols; }
  std::size_t size() const noexcept { return node_->value.size(); }

  std::span<Real> data() noexcept { return node_->value; }
  std::span<const Real> data() const noexcept { return node_->value; }

  Real& operator()(std::size_t r, std::size_t c) { return node_->value[r * cols() + c]; }
  Real operator()(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }

  Real item() const {
    if (size() != 1) throw RuntimeError("item() on non-scalar tensor " + to_string(shape()));
    return node_->value[0];
  }

  bool requires_grad() const noexcept { return node_->requires_grad; }
  void set_requires_grad(bool on) noexcept {
    node_->requires_grad = on;
    if (!on) node_->grad.clear();
  }

  bool has_grad() const noexcept { return !node_->grad.empty(); }
  std::span<const Real> grad() const noexcept { return node_->grad; }
  std::span<Real> grad() noexcept { return node_->grad; }
  void clear_grad() noexcept { node_->grad.clear(); }

  bool is_leaf() const noexcept { return !node_->backward; }
  const char* op() const noexcept { return node_->op; }

  /// Deep copy of the value as a fresh leaf.
  Tensor clone(bool requires_grad = false) const {
    return from_vector(rows(), cols(), node_->value, requires_grad);
  }

  NodeType& node() const noexcept { return *node_; }
  const std::shared_ptr<NodeType>& node_ptr() const noexcept { return node_; }

  bool same_node(const Tensor& other) const noexcept { return node_ == other.node_; }

 private:
  explicit Tensor(std::shared_ptr<NodeType> node) : node_(std::move(node)) {}

  template <class R>
  friend Tensor<R> make_op_result(Shape, std::vector<R>, const char*,
                                   std::vector<Tensor<R>>,
                                   std::function<void(detail::Node<R>&)>);

  std::shared_ptr<NodeType> node_;
};

/// Creates an op output and records it on the tape when any input needs a
/// gradient and recording is enabled.
template <class Real>
Tensor<Real> make_op_result(Shape shape, std::vector<Real> value, const char* op,
                            std::vector<Tensor<Real>> inputs,
                            std::function<void(detail::Node<Real>&)> backward) {
  auto node = std::make_shared<detail::Node<Real>>();
  node->shape = shape;
  node->value = std::move(value);
  node->op = op;
  bool needs = false;
  if (grad_enabled()) {
    for (const auto& in : inputs) needs = needs || in.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (auto& in : inputs) node->inputs.push_back(in.node_ptr());
    node->backward = std::move(backward);
  }
  return Tensor<Real>(std::move(node));
}

namespace detail {

inline void check(bool ok, const char* op, const std::string& what) {
  if (!ok) throw RuntimeError(std::string(op) + ": " + what);
}

template <class Real>
void check_same_shape(const Tensor<Real>& a, const Tensor<Real>& b, const char* op) {
  check(a.shape() == b.shape(), op,
        "shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
}

// C (n x m) += A (n x k) * B (k x m)
template <class Real>
void gemm_nn(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    Real* crow = c + i * m;
    const Real* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const Real av = arow[p];
      const Real* brow = b + p * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

// C (n x k) += A (n x m) * B^T where B is (k x m)
template <class Real>
void gemm_nt(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t m, std::size_t k) {
  for (std::size_t i = 0; i < n; ++i) {
    const Real* arow = a + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const Real* brow = b + p * m;
      Real acc = 0;
      for (std::size_t j = 0; j < m; ++j) acc += arow[j] * brow[j];
      c[i * k + p] += acc;
    }
  }
}

// C (k x m) += A^T * B where A is (n x k), B is (n x m)
template <class Real>
void gemm_tn(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const Real* arow = a + i * k;
    const Real* brow = b + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const Real av = arow[p];
      Real* crow = c + p * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

template <class Real>
void accumulate(Node<Real>& target, std::span<const Real> delta) {
  if (!target.requires_grad) return;
  target.ensure_grad();
  for (std::size_t i = 0; i < delta.size(); ++i) target.grad[i] += delta[i];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ops
// ---------------------------------------------------------------------------

template <class Real>
Tensor<Real> matmul(const Tensor<Real>& a, const Tensor<Real>& b) {
  detail::check(a.cols() == b.rows(), "matmul",
                "inner dimensions differ " + to_string(a.shape()) + " * " + to_string(b.shape()));
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  std::vector<Real> out(n * m, Real(0));
  detail::gemm_nn(a.data().data(), b.data().data(), out.data(), n, k, m);
  return make_op_result<Real>({n, m}, std::move(out), "matmul", {a, b}, [n, k, m](auto& self) {
    auto& na = *self.inputs[0];
    auto& nb = *self.inputs[1];
    if (na.requires_grad) {
      na.ensure_grad();
      detail::gemm_nt(self.grad.data(), nb.value.data(), na.grad.data(), n, m, k);
    }
    if (nb.requires_grad) {
      nb.ensure_grad();
      detail::gemm_tn(na.value.data(), self.grad.data(), nb.grad.data(), n, k, m);
    }
  });
}

template <class Real>
Tensor<Real> transpose(const Tensor<Real>& a) {
  const std::size_t n = a.rows(), m = a.cols();
  std::vector<Real> out(n * m);
  const auto src = a.data();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[j * n + i] = src[i * m + j];
  return make_op_result<Real>({m, n}, std::move(out), "transpose", {a}, [n, m](auto& self) {
    auto& na = *self.inputs[0];
    na.ensure_grad();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) na.grad[i * m + j] += self.grad[j * n + i];
  });
}

template <class Real>
Tensor<Real> add(const Tensor<Real>& a, const Tensor<Real>& b) {
  detail::check_same_shape(a, b, "add");
  std::vector<Real> out(a.size());
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return make_op_result<Real>(a.shape(), std::move(out), "add", {a, b}, [](auto& self) {
    detail::accumulate<Real>(*self.inputs[0], self.grad);
    detail::accumulate<Real>(*self.inputs[1], self.grad);
  });
}

/// Elementwise product.
template <class Real>
Tensor<Real> mul(const Tensor<Real>& a, const Tensor<Real>& b) {
  detail::check_same_shape(a, b, "mul");
  std::vector<Real> out(a.size());
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return make_op_result<Real>(a.shape(), std::move(out), "mul", {a, b}, [](auto& self) {
    auto& na = *self.inputs[0];
    auto& nb = *self.inputs[1];
    if (na.requires_grad) {
      na.ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) na.grad[i] += self.grad[i] * nb.value[i];
    }
    if (nb.requires_grad) {
      nb.ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) nb.grad[i] += self.grad[i] * na.value[i];
    }
  });
}

/// Adds a 1 x n row to every row of an m x n matrix.
template <class Real>
Tensor<Real> add_broadcast_row(const Tensor<Real>& a, const Tensor<Real>& row) {
  detail::check(row.rows() == 1 && row.cols() == a.cols(), "add_broadcast_row",
                "row " + to_string(row.shape()) + " does not fit " + to_string(a.shape()));
  const std::size_t n = a.rows(), m = a.cols();
  std::vector<Real> out(a.size());
  const auto x = a.data();
  const auto r = row.data();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = x[i * m + j] + r[j];
  return make_op_result<Real>(a.shape(), std::move(out), "add_broadcast_row", {a, row},
                              [n, m](auto& self) {
                                detail::accumulate<Real>(*self.inputs[0], self.grad);
                                auto& nr = *self.inputs[1];
                                if (nr.requires_grad) {
                                  nr.ensure_grad();
                                  for (std::size_t i = 0; i < n; ++i)
                                    for (std::size_t j = 0; j < m; ++j)
                                      nr.grad[j] += self.grad[i * m + j];
                                }
                              });
}

template <class Real>
Tensor<Real> scale(const Tensor<Real>& a, Real s) {
  std::vector<Real> out(a.size());
  const auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * s;
  return make_op_result<Real>(a.shape(), std::move(out), "scale", {a}, [s](auto& self) {
    auto& na = *self.inputs[0];
    na.ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) na.grad[i] += self.grad[i] * s;
  });
}

template <class Real>
Tensor<Real> tanh(const Tensor<Real>& a) {
  std::vector<Real> out(a.size());
  const auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(x[i]);
  return make_op_result<Real>(a.shape(), std::move(out), "tanh", {a}, [](auto& self) {
    auto& na = *self.inputs[0];
    na.ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const Real y = self.value[i];
      na.grad[i] += self.grad[i] * (Real(1) - y * y);
    }
  });
}

template <class Real>
Tensor<Real> sigmoid(const Tensor<Real>& a) {
  std::vector<Real> out(a.size());
  const auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Branch on sign so exp never overflows.
    if (x[i] >= 0) {
      out[i] = Real(1) / (Real(1) + std::exp(-x[i]));
    } else {
      const Real e = std::exp(x[i]);
      out[i] = e / (Real(1) + e);
    }
  }
  return make_op_result<Real>(a.shape(), std::move(out), "sigmoid", {a}, [](auto& self) {
    auto& na = *self.inputs[0];
    na.ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const Real y = self.value[i];
      na.grad[i] += self.grad[i] * y * (Real(1) - y);
    }
  });
}

/// Exact (erf-based) GELU, used as the feed-forward activation.
template <class Real>
Tensor<Real> gelu(const Tensor<Real>& a) {
  constexpr Real kInvSqrt2 = Real(0.70710678118654752440);
  constexpr Real kInvSqrt2Pi = Real(0.39894228040143267794);
  std::vector<Real> out(a.size());
  const auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = Real(0.5) * x[i] * (Real(1) + std::erf(x[i] * kInvSqrt2));
  return make_op_result<Real>(a.shape(), std::move(out), "gelu", {a}, [](auto& self) {
    auto& na = *self.inputs[0];
    na.ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const Real v = na.value[i];
      const Real cdf = Real(0.5) * (Real(1) + std::erf(v * kInvSqrt2));
      const Real pdf = kInvSqrt2Pi * std::exp(Real(-0.5) * v * v);
      na.grad[i] += self.grad[i] * (cdf + v * pdf);
    }
  });
}

/// Row-wise softmax over the last dimension. Columns whose key_mask entry is 0
/// receive exactly zero probability. A row with no unmasked column is all
/// zeros and passes no gradient.
template <class Real>
Tensor<Real> softmax_lastdim_masked(const Tensor<Real>& a, const Mask& key_mask) {
  const std::size_t n = a.rows(), m = a.cols();
  detail::check(key_mask.empty() || key_mask.size() == m, "softmax_lastdim_masked",
                "mask length " + std::to_string(key_mask.size()) + " != " + std::to_string(m));
  std::vector<Real> out(a.size(), Real(0));
  const auto x = a.data();
  auto live = [&](std::size_t j) { return key_mask.empty() || key_mask[j] != 0; };
  for (std::size_t i = 0; i < n; ++i) {
    const Real* row = x.data() + i * m;
    Real* dst = out.data() + i * m;
    Real mx = -std::numeric_limits<Real>::infinity();
    for (std::size_t j = 0; j < m; ++j)
      if (live(j)) mx = std::max(mx, row[j]);
    if (mx == -std::numeric_limits<Real>::infinity()) continue;  // fully masked
    Real sum = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (!live(j)) continue;
      dst[j] = std::exp(row[j] - mx);
      sum += dst[j];
    }
    for (std::size_t j = 0; j < m; ++j) dst[j] /= sum;
  }
  return make_op_result<Real>(a.shape(), std::move(out), "softmax_lastdim_masked", {a},
                              [n, m](auto& self) {
                                auto& na = *self.inputs[0];
                                na.ensure_grad();
                                for (std::size_t i = 0; i < n; ++i) {
                                  const Real* y = self.value.data() + i * m;
                                  const Real* dy = self.grad.data() + i * m;
                                  Real dot = 0;
                                  for (std::size_t j = 0; j < m; ++j) dot += y[j] * dy[j];
                                  for (std::size_t j = 0; j < m; ++j)
                                    na.grad[i * m + j] += y[j] * (dy[j] - dot);
                                }
                              });
}

/// Row-wise layer normalization with learned gain and bias (both 1 x n).
template <class Real>
Tensor<Real> layer_norm(const Tensor<Real>& a, const Tensor<Real>& gain, const Tensor<Real>& bias,
                        Real eps = Real(1e-5)) {
  const std::size_t n = a.rows(), m = a.cols();
  detail::check(gain.rows() == 1 && gain.cols() == m && bias.rows() == 1 && bias.cols() == m,
                "layer_norm", "gain/bias must be 1x" + std::to_string(m));
  std::vector<Real> out(a.size());
  std::vector<Real> xhat(a.size());
  std::vector<Real> inv_std(n);
  const auto x = a.data();
  const auto g = gain.data();
  const auto b = bias.data();
  for (std::size_t i = 0; i < n; ++i) {
    const Real* row = x.data() + i * m;
    Real mean = 0;
    for (std::size_t j = 0; j < m; ++j) mean += row[j];
    mean /= static_cast<Real>(m);
    Real var = 0;
    for (std::size_t j = 0; j < m; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<Real>(m);
    const Real is = Real(1) / std::sqrt(var + eps);
    inv_std[i] = is;
    for (std::size_t j = 0; j < m; ++j) {
      const Real h = (row[j] - mean) * is;
      xhat[i * m + j] = h;
      out[i * m + j] = h * g[j] + b[j];
    }
  }
  return make_op_result<Real>(
      a.shape(), std::move(out), "layer_norm", {a, gain, bias},
      [n, m, xhat = std::move(xhat), inv_std = std::move(inv_std)](auto& self) {
        auto& na = *self.inputs[0];
        auto& ng = *self.inputs[1];
        auto& nb = *self.inputs[2];
        if (ng.requires_grad) ng.ensure_grad();
        if (nb.requires_grad) nb.ensure_grad();
        if (na.requires_grad) na.ensure_grad();
        std::vector<Real> dxhat(m);
        for (std::size_t i = 0; i < n; ++i) {
          const Real* dy = self.grad.data() + i * m;
          const Real* h = xhat.data() + i * m;
          if (ng.requires_grad)
            for (std::size_t j = 0; j < m; ++j) ng.grad[j] += dy[j] * h[j];
          if (nb.requires_grad)
            for (std::size_t j = 0; j < m; ++j) nb.grad[j] += dy[j];
          if (!na.requires_grad) continue;
          Real mean_d = 0, mean_dh = 0;
          for (std::size_t j = 0; j < m; ++j) {
            dxhat[j] = dy[j] * ng.value[j];
            mean_d += dxhat[j];
            mean_dh += dxhat[j] * h[j];
          }
          mean_d /= static_cast<Real>(m);
          mean_dh /= static_cast<Real>(m);
          for (std::size_t j = 0; j < m; ++j)
            na.grad[i * m + j] += inv_std[i] * (dxhat[j] - mean_d - h[j] * mean_dh);
        }
      });
}

/// Mean over the rows whose mask entry is 1, giving a 1 x n row.
template <class Real>
Tensor<Real> mean_rows_masked(const Tensor<Real>& a, const Mask& row_mask) {
  const std::size_t n = a.rows(), m = a.cols();
  detail::check(row_mask.empty() || row_mask.size() == n, "mean_rows_masked",
                "mask length " + std::to_string(row_mask.size()) + " != " + std::to_string(n));
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += (row_mask.empty() || row_mask[i]) ? 1 : 0;
  detail::check(count > 0, "mean_rows_masked", "no unmasked rows");
  std::vector<Real> out(m, Real(0));
  const auto x = a.data();
  for (std::size_t i = 0; i < n; ++i) {
    if (!row_mask.empty() && !row_mask[i]) continue;
    for (std::size_t j = 0; j < m; ++j) out[j] += x[i * m + j];
  }
  const Real inv = Real(1) / static_cast<Real>(count);
  for (auto& v : out) v *= inv;
  return make_op_result<Real>({1, m}, std::move(out), "mean_rows_masked", {a},
                              [n, m, inv, row_mask](auto& self) {
                                auto& na = *self.inputs[0];
                                na.ensure_grad();
                                for (std::size_t i = 0; i < n; ++i) {
                                  if (!row_mask.empty() && !row_mask[i]) continue;
                                  for (std::size_t j = 0; j < m; ++j)
                                    na.grad[i * m + j] += self.grad[j] * inv;
                                }
                              });
}

template <class Real>
Tensor<Real> concat_rows(const std::vector<Tensor<Real>>& parts) {
  detail::check(!parts.empty(), "concat_rows", "no inputs");
  const std::size_t m = parts.front().cols();
  std::size_t n = 0;
  for (const auto& p : parts) {
    detail::check(p.cols() == m, "concat_rows", "column counts differ");
    n += p.rows();
  }
  std::vector<Real> out;
  out.reserve(n * m);
  for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
  return make_op_result<Real>({n, m}, std::move(out), "concat_rows", parts, [](auto& self) {
    std::size_t offset = 0;
    for (auto& in : self.inputs) {
      const std::size_t len = in->value.size();
      if (in->requires_grad) {
        in->ensure_grad();
        for (std::size_t i = 0; i < len; ++i) in->grad[i] += self.grad[offset + i];
      }
      offset += len;
    }
  });
}

template <class Real>
Tensor<Real> concat_cols(const std::vector<Tensor<Real>>& parts) {
  detail::check(!parts.empty(), "concat_cols", "no inputs");
  const std::size_t n = parts.front().rows();
  std::size_t m = 0;
  for (const auto& p : parts) {
    detail::check(p.rows() == n, "concat_cols", "row counts differ");
    m += p.cols();
  }
  std::vector<Real> out(n * m);
  std::size_t col = 0;
  for (const auto& p : parts) {
    const std::size_t pc = p.cols();
    const auto src = p.data();
    for (std::size_t i = 0; i < n; ++i)
      std::copy_n(src.data() + i * pc, pc, out.data() + i * m + col);
    col += pc;
  }
  return make_op_result<Real>({n, m}, std::move(out), "concat_cols", parts, [n, m](auto& self) {
    std::size_t col = 0;
    for (auto& in : self.inputs) {
      const std::size_t pc = in->shape.cols;
      if (in->requires_grad) {
        in->ensure_grad();
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < pc; ++j) in->grad[i * pc + j] += self.grad[i * m + col + j];
      }
      col += pc;
    }
  });
}

/// Columns [begin, begin + count).
template <class Real>
Tensor<Real> slice_cols(const Tensor<Real>& a, std::size_t begin, std::size_t count) {
  const std::size_t n = a.rows(), m = a.cols();
  detail::check(count > 0 && begin + count <= m, "slice_cols", "range out of bounds");
  std::vector<Real> out(n * count);
  const auto src = a.data();
  for (std::size_t i = 0; i < n; ++i)
    std::copy_n(src.data() + i * m + begin, count, out.data() + i * count);
  return make_op_result<Real>({n, count}, std::move(out), "slice_cols", {a},
                              [n, m, begin, count](auto& self) {
                                auto& na = *self.inputs[0];
                                na.ensure_grad();
                                for (std::size_t i = 0; i < n; ++i)
                                  for (std::size_t j = 0; j < count; ++j)
                                    na.grad[i * m + begin + j] += self.grad[i * count + j];
                              });
}

/// Rows [begin, begin + count).
template <class Real>
Tensor<Real> slice_rows(const Tensor<Real>& a, std::size_t begin, std::size_t count) {
  const std::size_t m = a.cols();
  detail::check(count > 0 && begin + count <= a.rows(), "slice_rows", "range out of bounds");
  std::vector<Real> out(a.data().begin() + static_cast<std::ptrdiff_t>(begin * m),
                        a.data().begin() + static_cast<std::ptrdiff_t>((begin + count) * m));
  return make_op_result<Real>({count, m}, std::move(out), "slice_rows", {a},
                              [m, begin](auto& self) {
                                auto& na = *self.inputs[0];
                                na.ensure_grad();
                                for (std::size_t i = 0; i < self.grad.size(); ++i)
                                  na.grad[begin * m + i] += self.grad[i];
                              });
}

template <class Real>
Tensor<Real> sum(const Tensor<Real>& a) {
  Real s = 0;
  for (Real v : a.data()) s += v;
  return make_op_result<Real>({1, 1}, {s}, "sum", {a}, [](auto& self) {
    auto& na = *self.inputs[0];
    na.ensure_grad();
    for (auto& g : na.grad) g += self.grad[0];
  });
}

/// Mean binary cross-entropy on raw logits (n x 1) in the stable form
/// max(z,0) - z*y + log(1 + exp(-|z|)).
template <class Real>
Tensor<Real> bce_with_logits(const Tensor<Real>& logits, std::span<const Real> labels) {
  detail::check(logits.cols() == 1 && logits.rows() == labels.size(), "bce_with_logits",
                "logits " + to_string(logits.shape()) + " vs " + std::to_string(labels.size()) +
                    " labels");
  detail::check(!labels.empty(), "bce_with_logits", "empty batch");
  const std::size_t n = labels.size();
  std::vector<Real> y(labels.begin(), labels.end());
  for (Real v : y) detail::check(v == Real(0) || v == Real(1), "bce_with_logits", "label not in {0,1}");
  Real total = 0;
  const auto z = logits.data();
  for (std::size_t i = 0; i < n; ++i)
    total += std::max(z[i], Real(0)) - z[i] * y[i] + std::log1p(std::exp(-std::abs(z[i])));
  const Real inv_n = Real(1) / static_cast<Real>(n);
  return make_op_result<Real>({1, 1}, {total * inv_n}, "bce_with_logits", {logits},
                              [y = std::move(y), inv_n](auto& self) {
                                auto& nz = *self.inputs[0];
                                nz.ensure_grad();
                                for (std::size_t i = 0; i < y.size(); ++i) {
                                  const Real zi = nz.value[i];
                                  const Real s = zi >= 0 ? Real(1) / (Real(1) + std::exp(-zi))
                                                         : std::exp(zi) / (Real(1) + std::exp(zi));
                                  nz.grad[i] += self.grad[0] * (s - y[i]) * inv_n;
                                }
                              });
}

// ---------------------------------------------------------------------------
// Backward
// ---------------------------------------------------------------------------

/// Populates gradients of every requires_grad tensor reachable from `loss`.
template <class Real>
void backward(const Tensor<Real>& loss) {
  if (!loss.defined() || loss.size() != 1) throw RuntimeError("backward: loss must be a scalar");
  if (!loss.requires_grad()) throw RuntimeError("backward: loss is detached from the tape");

  using NodeT = detail::Node<Real>;
  // Iterative post-order DFS gives a topological order without recursion.
  std::vector<NodeT*> order;
  std::unordered_set<NodeT*> visited;
  std::vector<std::pair<NodeT*, std::size_t>> stack;
  stack.emplace_back(&loss.node(), 0);
  visited.insert(&loss.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      NodeT* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Interior gradients are scratch space for this pass only.
  for (NodeT* n : order)
    if (n->backward) n->grad.assign(n->value.size(), Real(0));
  loss.node().ensure_grad();
  loss.node().grad[0] += Real(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeT* n = *it;
    if (n->backward) n->backward(*n);
  }
  for (NodeT* n : order)
    if (n->backward) std::vector<Real>().swap(n->grad);
}

}  // namespace logformer
