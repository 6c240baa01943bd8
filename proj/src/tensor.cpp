// Copyright 2026 The arionet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arionet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "arionet/errors.hpp"
#include "arionet/kernels.hpp"

namespace arionet::nn {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw InvalidArgument(std::string(op) + ": incompatible shapes " + shape_str(a) +
                        " and " + shape_str(b));
}

template <typename T>
void require_rank2(const char* op, const Tensor<T>& a) {
  if (a.rank() != 2) {
    throw InvalidArgument(std::string(op) + ": expected a 2-D tensor, got " +
                          shape_str(a.shape()));
  }
}

// Rows x last-axis view used by the row-wise ops.
template <typename T>
std::pair<std::size_t, std::size_t> rows_cols(const char* op, const Tensor<T>& a) {
  if (a.rank() == 0 || a.shape().back() == 0) {
    throw InvalidArgument(std::string(op) + ": tensor has no last axis " +
                          shape_str(a.shape()));
  }
  const std::size_t cols = a.shape().back();
  return {a.size() / cols, cols};
}

enum class Broadcast { kSame, kRow };

template <typename T>
Broadcast broadcast_kind(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() == b.shape()) return Broadcast::kSame;
  const std::size_t last = a.rank() ? a.shape().back() : 0;
  const bool row_vector = (b.rank() == 1 && b.dim(0) == last) ||
                          (b.rank() == 2 && b.dim(0) == 1 && b.dim(1) == last);
  if (a.rank() >= 1 && row_vector) return Broadcast::kRow;
  shape_error(op, a.shape(), b.shape());
}

template <typename T>
void accumulate(Node<T>& target, std::span<const T> delta) {
  if (!target.requires_grad) return;
  auto& g = target.ensure_grad();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += delta[i];
}

}  // namespace

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
  auto node = std::make_shared<Node<T>>();
  node->value.assign(numel(shape), value);
  node->shape = std::move(shape);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::from_data(Shape shape, std::vector<T> data, bool requires_grad) {
  if (numel(shape) != data.size()) {
    throw InvalidArgument("Tensor::from_data: shape " + shape_str(shape) + " needs " +
                          std::to_string(numel(shape)) + " values, got " +
                          std::to_string(data.size()));
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return full({}, value, requires_grad);
}

template <typename T>
void Tensor<T>::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), T(0));
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) {
    throw InvalidArgument("item: tensor of shape " + shape_str(shape()) +
                          " is not a scalar");
  }
  return node_->value[0];
}

template <typename T>
T Tensor<T>::at(std::size_t r, std::size_t c) const {
  return node_->value.at(r * node_->shape.back() + c);
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return from_data(shape(), node_->value, false);
}

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> value,
                      const std::vector<Tensor<T>>& inputs,
                      std::function<void(Node<T>&)> backward) {
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  const bool track = std::any_of(inputs.begin(), inputs.end(),
                                 [](const Tensor<T>& t) { return t.requires_grad(); });
  if (track) {
    node->requires_grad = true;
    node->parents.reserve(inputs.size());
    for (const auto& t : inputs) node->parents.push_back(t.node());
    node->backward_fn = std::move(backward);
  }
  return Tensor<T>(std::move(node));
}

template <typename T>
void backward(const Tensor<T>& loss) {
  if (loss.size() != 1) {
    throw InvalidArgument("backward: loss must be a scalar, got shape " +
                          shape_str(loss.shape()));
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node<T>* n : order) {
    if (n->backward_fn) n->grad.assign(n->value.size(), T(0));
  }
  loss.node()->ensure_grad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn) (*it)->backward_fn(**it);
  }
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    shape_error("matmul", a.shape(), b.shape());
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<T> out(m * n);
  kernels::gemm_nn(a.data().data(), b.data().data(), out.data(), m, k, n, false);
  return make_result<T>({m, n}, std::move(out), {a, b}, [m, k, n](Node<T>& self) {
    Node<T>& na = *self.parents[0];
    Node<T>& nb = *self.parents[1];
    if (na.requires_grad) {
      kernels::gemm_nt(self.grad.data(), nb.value.data(), na.ensure_grad().data(), m, n, k,
                       true);
    }
    if (nb.requires_grad) {
      kernels::gemm_tn(na.value.data(), self.grad.data(), nb.ensure_grad().data(), m, k, n,
                       true);
    }
  });
}

template <typename T>
Tensor<T> matmul_nt(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(1)) {
    shape_error("matmul_nt", a.shape(), b.shape());
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  std::vector<T> out(m * n);
  kernels::gemm_nt(a.data().data(), b.data().data(), out.data(), m, k, n, false);
  return make_result<T>({m, n}, std::move(out), {a, b}, [m, k, n](Node<T>& self) {
    Node<T>& na = *self.parents[0];
    Node<T>& nb = *self.parents[1];
    if (na.requires_grad) {
      kernels::gemm_nn(self.grad.data(), nb.value.data(), na.ensure_grad().data(), m, n, k,
                       true);
    }
    if (nb.requires_grad) {
      kernels::gemm_tn(self.grad.data(), na.value.data(), nb.ensure_grad().data(), m, n, k,
                       true);
    }
  });
}

namespace {

// Shared implementation of add / sub / mul with optional row broadcast.
enum class Binary { kAdd, kSub, kMul };

template <typename T>
Tensor<T> binary_op(const char* name, Binary op, const Tensor<T>& a, const Tensor<T>& b) {
  const Broadcast kind = broadcast_kind(name, a, b);
  const std::size_t n = a.size();
  const std::size_t width = kind == Broadcast::kRow ? b.size() : n;
  std::vector<T> out(n);
  const auto av = a.data();
  const auto bv = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    const T y = bv[i % width];
    switch (op) {
      case Binary::kAdd: out[i] = av[i] + y; break;
      case Binary::kSub: out[i] = av[i] - y; break;
      case Binary::kMul: out[i] = av[i] * y; break;
    }
  }
  return make_result<T>(a.shape(), std::move(out), {a, b}, [op, n, width](Node<T>& self) {
    Node<T>& na = *self.parents[0];
    Node<T>& nb = *self.parents[1];
    const auto& g = self.grad;
    if (na.requires_grad) {
      auto& ga = na.ensure_grad();
      for (std::size_t i = 0; i < n; ++i) {
        ga[i] += op == Binary::kMul ? g[i] * nb.value[i % width] : g[i];
      }
    }
    if (nb.requires_grad) {
      auto& gb = nb.ensure_grad();
      for (std::size_t i = 0; i < n; ++i) {
        T d = g[i];
        if (op == Binary::kSub) d = -d;
        if (op == Binary::kMul) d *= na.value[i];
        gb[i % width] += d;
      }
    }
  });
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_op("add", Binary::kAdd, a, b);
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_op("sub", Binary::kSub, a, b);
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_op("mul", Binary::kMul, a, b);
}

template <typename T>
Tensor<T> mul_scalar(const Tensor<T>& a, T s) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& v : out) v *= s;
  return make_result<T>(a.shape(), std::move(out), {a}, [s](Node<T>& self) {
    Node<T>& na = *self.parents[0];
    auto& ga = na.ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += s * self.grad[i];
  });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& v : out) v = v > T(0) ? v : T(0);
  auto r = make_result<T>(a.shape(), std::move(out), {a}, [](Node<T>& self) {
    Node<T>& na = *self.parents[0];
    auto& ga = na.ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      if (na.value[i] > T(0)) ga[i] += self.grad[i];
    }
  });
  r.node()->op = "relu";
  return r;
}

template <typename T>
Tensor<T> clamp(const Tensor<T>& a, T lo, T hi) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& v : out) v = std::clamp(v, lo, hi);
  auto r = make_result<T>(a.shape(), std::move(out), {a}, [lo, hi](Node<T>& self) {
    Node<T>& na = *self.parents[0];
    auto& ga = na.ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      if (na.value[i] > lo && na.value[i] < hi) ga[i] += self.grad[i];
    }
  });
  r.node()->op = "clamp";
  return r;
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& a) {
  const auto [rows, cols] = rows_cols("softmax", a);
  std::vector<T> out(a.size());
  const auto x = a.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x.data() + r * cols;
    T* yr = out.data() + r * cols;
    const T peak = *std::max_element(xr, xr + cols);
    T total = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      yr[c] = std::exp(xr[c] - peak);
      total += yr[c];
    }
    for (std::size_t c = 0; c < cols; ++c) yr[c] /= total;
  }
  return make_result<T>(a.shape(), std::move(out), {a}, [rows, cols](Node<T>& self) {
    auto& ga = self.parents[0]->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r) {
      const T* y = self.value.data() + r * cols;
      const T* g = self.grad.data() + r * cols;
      T dot = 0;
      for (std::size_t c = 0; c < cols; ++c) dot += g[c] * y[c];
      for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += y[c] * (g[c] - dot);
    }
  });
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& a, T eps) {
  const auto [rows, cols] = rows_cols("layer_norm", a);
  std::vector<T> out(a.size());
  std::vector<T> inv_std(rows);
  const auto x = a.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x.data() + r * cols;
    T mu = 0;
    for (std::size_t c = 0; c < cols; ++c) mu += xr[c];
    mu /= static_cast<T>(cols);
    T var = 0;
    for (std::size_t c = 0; c < cols; ++c) var += (xr[c] - mu) * (xr[c] - mu);
    var /= static_cast<T>(cols);
    inv_std[r] = T(1) / std::sqrt(var + eps);
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = (xr[c] - mu) * inv_std[r];
  }
  return make_result<T>(
      a.shape(), std::move(out), {a},
      [rows, cols, inv_std = std::move(inv_std)](Node<T>& self) {
        auto& ga = self.parents[0]->ensure_grad();
        const T inv_n = T(1) / static_cast<T>(cols);
        for (std::size_t r = 0; r < rows; ++r) {
          const T* y = self.value.data() + r * cols;
          const T* g = self.grad.data() + r * cols;
          T g_mean = 0, gy_mean = 0;
          for (std::size_t c = 0; c < cols; ++c) {
            g_mean += g[c];
            gy_mean += g[c] * y[c];
          }
          g_mean *= inv_n;
          gy_mean *= inv_n;
          for (std::size_t c = 0; c < cols; ++c) {
            ga[r * cols + c] += inv_std[r] * (g[c] - g_mean - y[c] * gy_mean);
          }
        }
      });
}

template <typename T>
Tensor<T> l2_normalize(const Tensor<T>& a) {
  const auto [rows, cols] = rows_cols("l2_normalize", a);
  std::vector<T> out(a.size(), T(0));
  std::vector<T> norms(rows);
  const auto x = a.data();
  for (std::size_t r = 0; r < rows; ++r) {
    T ss = 0;
    for (std::size_t c = 0; c < cols; ++c) ss += x[r * cols + c] * x[r * cols + c];
    norms[r] = std::sqrt(ss);
    if (norms[r] > T(0)) {
      for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = x[r * cols + c] / norms[r];
    }
  }
  return make_result<T>(
      a.shape(), std::move(out), {a}, [rows, cols, norms = std::move(norms)](Node<T>& self) {
        auto& ga = self.parents[0]->ensure_grad();
        for (std::size_t r = 0; r < rows; ++r) {
          if (norms[r] <= T(0)) continue;
          const T* y = self.value.data() + r * cols;
          const T* g = self.grad.data() + r * cols;
          T dot = 0;
          for (std::size_t c = 0; c < cols; ++c) dot += y[c] * g[c];
          for (std::size_t c = 0; c < cols; ++c) {
            ga[r * cols + c] += (g[c] - y[c] * dot) / norms[r];
          }
        }
      });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a, std::size_t axis) {
  require_rank2("mean", a);
  if (axis > 1) throw InvalidArgument("mean: axis must be 0 or 1");
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  const auto x = a.data();
  Shape shape = axis == 0 ? Shape{1, cols} : Shape{rows, 1};
  std::vector<T> out(numel(shape), T(0));
  if (axis == 0) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) out[c] += x[r * cols + c];
    for (auto& v : out) v /= static_cast<T>(rows);
  } else {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) out[r] += x[r * cols + c];
      out[r] /= static_cast<T>(cols);
    }
  }
  return make_result<T>(std::move(shape), std::move(out), {a},
                        [axis, rows, cols](Node<T>& self) {
                          auto& ga = self.parents[0]->ensure_grad();
                          for (std::size_t r = 0; r < rows; ++r) {
                            for (std::size_t c = 0; c < cols; ++c) {
                              ga[r * cols + c] +=
                                  axis == 0 ? self.grad[c] / static_cast<T>(rows)
                                            : self.grad[r] / static_cast<T>(cols);
                            }
                          }
                        });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = 0;
  for (T v : a.data()) total += v;
  return make_result<T>({}, {total}, {a}, [](Node<T>& self) {
    auto& ga = self.parents[0]->ensure_grad();
    for (auto& g : ga) g += self.grad[0];
  });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis) {
  if (parts.empty()) throw InvalidArgument("concat: no inputs");
  if (axis > 1) throw InvalidArgument("concat: axis must be 0 or 1");
  for (const auto& p : parts) require_rank2("concat", p);
  const std::size_t keep = parts[0].dim(1 - axis);
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.dim(1 - axis) != keep) shape_error("concat", parts[0].shape(), p.shape());
    total += p.dim(axis);
  }
  const std::size_t rows = axis == 0 ? total : keep;
  const std::size_t cols = axis == 0 ? keep : total;
  std::vector<T> out(rows * cols);
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (const auto& p : parts) {
    offsets.push_back(off);
    const auto x = p.data();
    const std::size_t pr = p.dim(0), pc = p.dim(1);
    for (std::size_t r = 0; r < pr; ++r) {
      for (std::size_t c = 0; c < pc; ++c) {
        const std::size_t orow = axis == 0 ? off + r : r;
        const std::size_t ocol = axis == 0 ? c : off + c;
        out[orow * cols + ocol] = x[r * pc + c];
      }
    }
    off += p.dim(axis);
  }
  return make_result<T>({rows, cols}, std::move(out), parts,
                        [axis, cols, offsets = std::move(offsets)](Node<T>& self) {
                          for (std::size_t i = 0; i < self.parents.size(); ++i) {
                            Node<T>& np = *self.parents[i];
                            if (!np.requires_grad) continue;
                            auto& gp = np.ensure_grad();
                            const std::size_t pr = np.shape[0], pc = np.shape[1];
                            for (std::size_t r = 0; r < pr; ++r) {
                              for (std::size_t c = 0; c < pc; ++c) {
                                const std::size_t orow = axis == 0 ? offsets[i] + r : r;
                                const std::size_t ocol = axis == 0 ? c : offsets[i] + c;
                                gp[r * pc + c] += self.grad[orow * cols + ocol];
                              }
                            }
                          }
                        });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& a, std::size_t axis, std::size_t begin, std::size_t end) {
  require_rank2("slice", a);
  if (axis > 1) throw InvalidArgument("slice: axis must be 0 or 1");
  if (begin > end || end > a.dim(axis)) {
    throw InvalidArgument("slice: range [" + std::to_string(begin) + ", " +
                          std::to_string(end) + ") out of bounds for shape " +
                          shape_str(a.shape()));
  }
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  const std::size_t out_rows = axis == 0 ? end - begin : rows;
  const std::size_t out_cols = axis == 0 ? cols : end - begin;
  const std::size_t r0 = axis == 0 ? begin : 0;
  const std::size_t c0 = axis == 0 ? 0 : begin;
  std::vector<T> out(out_rows * out_cols);
  const auto x = a.data();
  for (std::size_t r = 0; r < out_rows; ++r)
    for (std::size_t c = 0; c < out_cols; ++c)
      out[r * out_cols + c] = x[(r0 + r) * cols + c0 + c];
  return make_result<T>({out_rows, out_cols}, std::move(out), {a},
                        [cols, out_rows, out_cols, r0, c0](Node<T>& self) {
                          auto& ga = self.parents[0]->ensure_grad();
                          for (std::size_t r = 0; r < out_rows; ++r)
                            for (std::size_t c = 0; c < out_cols; ++c)
                              ga[(r0 + r) * cols + c0 + c] += self.grad[r * out_cols + c];
                        });
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& a) {
  require_rank2("transpose", a);
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  std::vector<T> out(a.size());
  const auto x = a.data();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = x[r * cols + c];
  return make_result<T>({cols, rows}, std::move(out), {a}, [rows, cols](Node<T>& self) {
    auto& ga = self.parents[0]->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += self.grad[c * rows + r];
  });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (numel(shape) != a.size()) shape_error("reshape", a.shape(), shape);
  std::vector<T> out(a.data().begin(), a.data().end());
  return make_result<T>(std::move(shape), std::move(out), {a}, [](Node<T>& self) {
    accumulate<T>(*self.parents[0], self.grad);
  });
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& a, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw InvalidArgument("dropout: rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (rate == 0.0) return a;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(1.0 - rate);
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  std::vector<T> mask(a.size());
  for (auto& m : mask) m = keep(rng) ? scale : T(0);
  std::vector<T> out(a.size());
  const auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * mask[i];
  return make_result<T>(a.shape(), std::move(out), {a},
                        [mask = std::move(mask)](Node<T>& self) {
                          auto& ga = self.parents[0]->ensure_grad();
                          for (std::size_t i = 0; i < ga.size(); ++i)
                            ga[i] += self.grad[i] * mask[i];
                        });
}

template <typename T>
std::size_t parameter_count(const ParamList<T>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.tensor.size();
  return n;
}

template <typename T>
void zero_grads(ParamList<T>& params) {
  for (auto& p : params) p.tensor.zero_grad();
}

template <typename T>
ParamList<T> clone_params(const ParamList<T>& params) {
  ParamList<T> out;
  out.reserve(params.size());
  for (const auto& p : params) {
    auto t = p.tensor.detach();
    t.set_requires_grad(p.tensor.requires_grad());
    out.push_back({p.name, std::move(t)});
  }
  return out;
}

template <typename T>
void copy_param_values(const ParamList<T>& src, ParamList<T>& dst) {
  if (src.size() != dst.size()) {
    throw InvalidArgument("copy_param_values: parameter count mismatch");
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i].name != dst[i].name || src[i].tensor.shape() != dst[i].tensor.shape()) {
      throw InvalidArgument("copy_param_values: mismatch at " + src[i].name);
    }
    auto s = src[i].tensor.data();
    std::copy(s.begin(), s.end(), dst[i].tensor.data().begin());
  }
}

#define ARIONET_INSTANTIATE_TENSOR(T)                                                  \
  template class Tensor<T>;                                                            \
  template Tensor<T> make_result<T>(Shape, std::vector<T>, const std::vector<Tensor<T>>&, \
                                    std::function<void(Node<T>&)>);                    \
  template void backward<T>(const Tensor<T>&);                                         \
  template Tensor<T> matmul<T>(const Tensor<T>&, const Tensor<T>&);                    \
  template Tensor<T> matmul_nt<T>(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> add<T>(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> sub<T>(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> mul<T>(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> mul_scalar<T>(const Tensor<T>&, T);                               \
  template Tensor<T> relu<T>(const Tensor<T>&);                                        \
  template Tensor<T> clamp<T>(const Tensor<T>&, T, T);                                 \
  template Tensor<T> softmax<T>(const Tensor<T>&);                                     \
  template Tensor<T> layer_norm<T>(const Tensor<T>&, T);                               \
  template Tensor<T> l2_normalize<T>(const Tensor<T>&);                                \
  template Tensor<T> mean<T>(const Tensor<T>&, std::size_t);                           \
  template Tensor<T> sum<T>(const Tensor<T>&);                                         \
  template Tensor<T> concat<T>(const std::vector<Tensor<T>>&, std::size_t);            \
  template Tensor<T> slice<T>(const Tensor<T>&, std::size_t, std::size_t, std::size_t); \
  template Tensor<T> transpose<T>(const Tensor<T>&);                                   \
  template Tensor<T> reshape<T>(const Tensor<T>&, Shape);                              \
  template Tensor<T> dropout<T>(const Tensor<T>&, double, std::uint64_t);              \
  template std::size_t parameter_count<T>(const ParamList<T>&);                        \
  template void zero_grads<T>(ParamList<T>&);                                          \
  template ParamList<T> clone_params<T>(const ParamList<T>&);                          \
  template void copy_param_values<T>(const ParamList<T>&, ParamList<T>&);

ARIONET_INSTANTIATE_TENSOR(float)
ARIONET_INSTANTIATE_TENSOR(double)

#undef ARIONET_INSTANTIATE_TENSOR

}  // namespace arionet::nn
