/*
 * Copyright 2026 The GCE Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gce/numerics/dense_matrix.h"
#include "gce/numerics/sparse_matrix.h"

namespace gce {

// Trainable tensor. `grad` has the shape of `value` and is accumulated into by
// Tape::backward; callers zero it between steps.
struct Parameter {
  Parameter() = default;
  Parameter(std::string n, DenseMatrix v)
    : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad.fill(0.0); }
  std::size_t count() const { return value.size(); }

  std::string name;
  DenseMatrix value;
  DenseMatrix grad;
};

namespace ad {

class Tape;

// Handle to a matrix-valued node recorded on a Tape.
class Var {
 public:
  Var() = default;

  const DenseMatrix& value() const;
  // Gradient of the last backward root w.r.t. this node. Empty if unreached.
  const DenseMatrix& grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Records primitive matrix operations in execution order and replays their
// backward rules in exact reverse order. Sparse operands and masks captured by
// recorded operations must outlive the tape.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(DenseMatrix value);
  Var parameter(Parameter& p);

  // Adds an operation node. `backward` runs only when some input needs a gradient.
  Var record(DenseMatrix value, std::initializer_list<Var> inputs, Backward backward);
  Var record(DenseMatrix value, std::span<const Var> inputs, Backward backward);

  // Seeds d(root)/d(root) = 1 (root must be 1x1), then walks the tape backwards,
  // accumulating into Parameter::grad for every parameter leaf reached.
  void backward(Var root);

  const DenseMatrix& value(std::size_t id) const { return nodes_[id].value; }
  const DenseMatrix& grad(std::size_t id) const { return nodes_[id].grad; }
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  // Zero-initialised on first access.
  DenseMatrix& grad_buffer(std::size_t id);

  std::size_t size() const { return nodes_.size(); }
  // Node ids visited by the last backward call, in visiting order.
  std::span<const std::size_t> backward_order() const { return visited_; }

 private:
  struct Node {
    DenseMatrix value;
    DenseMatrix grad;
    Backward backward;
    Parameter* param = nullptr;
    bool needs_grad = false;
  };

  Var push(Node node);

  std::vector<Node> nodes_;
  std::vector<std::size_t> visited_;
};

// Differentiable primitives. Every op checks shapes and throws ShapeError.
Var matmul(Var a, Var b);
// s * d with s constant; s must outlive the tape.
Var spmm(const SparseMatrix& s, Var d);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double factor);
// Adds the 1 x c row vector `row` to every row of x.
Var add_row(Var x, Var row);
// Adds the 1 x 1 scalar to every entry of x.
Var add_scalar(Var x, Var scalar);
// Multiplies by a constant mask of the same shape (dropout).
Var mask(Var x, const DenseMatrix& mask);
Var relu(Var x);
Var sigmoid(Var x);
Var softplus(Var x);
// out[i] = x[ids[i]]
Var gather_rows(Var x, std::span<const std::size_t> ids);
Var concat_cols(std::span<const Var> parts);
// n x c -> n x 1
Var row_sum(Var x);
// n x c, n x c -> n x 1 rowwise inner product
Var row_dot(Var a, Var b);
Var sum(Var x);
Var mean(Var x);

}  // namespace ad

// Scalar activations used by the primitives above and by reference scorers.
double sigmoid(double x);
// ln(1 + e^x) without overflow for large |x|.
double softplus(double x);

}  // namespace gce
