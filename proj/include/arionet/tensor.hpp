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

// Minimal reverse-mode automatic differentiation over dense tensors.
//
// A Tensor is a shared handle to a graph node. Ops on tensors that require
// gradients record a backward closure; ops on constant tensors record nothing,
// so inference builds no graph. Instantiated for float and double.
//
// A graph is owned by whichever thread built it and must not be shared while
// backward() runs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace arionet::nn {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty until first touched
  bool requires_grad = false;
  const char* op = "";  // set by piecewise ops (relu, clamp)
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents' grads.
  std::function<void(Node&)> backward_fn;

  std::vector<T>& ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
    return grad;
  }
};

template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<T> data, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t size() const { return node_->value.size(); }

  std::span<T> data() { return node_->value; }
  std::span<const T> data() const { return node_->value; }

  /// Gradient buffer; allocated (zero) on first access.
  std::span<T> grad() { return node_->ensure_grad(); }
  bool has_grad() const { return node_->grad.size() == node_->value.size(); }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  void zero_grad();

  T item() const;
  T at(std::size_t i) const { return node_->value.at(i); }
  T at(std::size_t r, std::size_t c) const;

  /// Value copy detached from any graph.
  Tensor detach() const;

  const std::shared_ptr<Node<T>>& node() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

/// Builds the result node of a custom op. Gradient tracking is enabled iff
/// some input requires it; otherwise `backward` is dropped.
template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> value,
                      const std::vector<Tensor<T>>& inputs,
                      std::function<void(Node<T>&)> backward);

/// Populates gradients of every tensor reachable from the scalar `loss`.
/// Leaf gradients accumulate across calls; interior gradients are reset.
template <typename T>
void backward(const Tensor<T>& loss);

// ---------------------------------------------------------------------------
// Ops. Shape mismatches throw InvalidArgument naming both shapes.

/// [m,k] x [k,n] -> [m,n]
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
/// [m,k] x [n,k]^T -> [m,n]
template <typename T>
Tensor<T> matmul_nt(const Tensor<T>& a, const Tensor<T>& b);

/// Elementwise; `b` may also be a row vector ([n] or [1,n]) broadcast over the
/// rows of `a`.
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> mul_scalar(const Tensor<T>& a, T s);
template <typename T>
Tensor<T> relu(const Tensor<T>& a);
/// Clamp to [lo, hi]; gradient passes only where the input is inside.
template <typename T>
Tensor<T> clamp(const Tensor<T>& a, T lo, T hi);

// Row-wise ops along the last axis.
template <typename T>
Tensor<T> softmax(const Tensor<T>& a);
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& a, T eps = T(1e-5));
/// Unit L2 norm per row; an all-zero row stays zero.
template <typename T>
Tensor<T> l2_normalize(const Tensor<T>& a);

/// Mean of a 2-D tensor along `axis`, keeping the reduced axis as size 1.
template <typename T>
Tensor<T> mean(const Tensor<T>& a, std::size_t axis);
/// Sum of all elements -> scalar.
template <typename T>
Tensor<T> sum(const Tensor<T>& a);

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis);
/// Half-open range [begin, end) of a 2-D tensor along `axis`.
template <typename T>
Tensor<T> slice(const Tensor<T>& a, std::size_t axis, std::size_t begin, std::size_t end);
template <typename T>
Tensor<T> transpose(const Tensor<T>& a);
template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape);

/// Inverted dropout with a mask drawn from `seed`. rate == 0 returns `a`.
template <typename T>
Tensor<T> dropout(const Tensor<T>& a, double rate, std::uint64_t seed);

// ---------------------------------------------------------------------------

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

template <typename T>
using ParamList = std::vector<NamedTensor<T>>;

template <typename T>
std::size_t parameter_count(const ParamList<T>& params);

template <typename T>
void zero_grads(ParamList<T>& params);

/// Deep value copy (fresh leaves with the same requires_grad flags).
template <typename T>
ParamList<T> clone_params(const ParamList<T>& params);

/// Copies values from `src` into `dst` in place; names and shapes must match.
template <typename T>
void copy_param_values(const ParamList<T>& src, ParamList<T>& dst);

}  // namespace arionet::nn
