// Copyright 2026 The gapsim Authors
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

#ifndef GAPSIM_GRAD_TAPE_HPP_
#define GAPSIM_GRAD_TAPE_HPP_

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gapsim/grad/tensor.hpp"

namespace gap::grad {

// Handle to a value recorded on a Tape.
struct Slot {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Arguments handed to a primitive's vector-Jacobian product. Adjoints are
// accumulated (+=) into input_adjoints; `saved` holds forward intermediates
// stored at record time and `extra` an op-specific context struct.
struct VjpArgs {
  const Tensor& upstream;
  std::span<const Tensor* const> input_values;
  std::span<Tensor* const> input_adjoints;
  const std::vector<Tensor>& saved;
  const void* extra;
};

using VjpFn = std::function<void(const VjpArgs&)>;

// Global registry of differentiable primitives. record() rejects unknown ids.
void register_primitive(const std::string& op, VjpFn vjp);
bool primitive_registered(const std::string& op);
const VjpFn& primitive_vjp(const std::string& op);

// Ensures the built-in elementwise/reduction primitives are registered.
// Idempotent; modules with coarse primitives register theirs the same way.
void register_builtin_primitives();

// Reverse-mode tape over coarse-grained primitives. Nodes are stored in
// topological (insertion) order; one backward sweep visits each node at most
// once and accumulates adjoints additively.
class Tape {
 public:
  Tape() { register_builtin_primitives(); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf variable (gradient target) or constant; both are plain slots, a
  // constant is simply a leaf whose adjoint the caller never reads.
  Slot leaf(Tensor value);

  // Records one primitive application. `saved` and `extra` are forwarded to
  // the primitive's VJP at backward time. Throws on unknown op id.
  Slot record(const std::string& op, const std::vector<Slot>& inputs,
              Tensor value, std::vector<Tensor> saved = {},
              std::shared_ptr<const void> extra = nullptr);

  // Seeds root with `seed` and runs one reverse sweep. Adjoints accumulate;
  // call zero_adjoints() between independent sweeps.
  void backward(Slot root, const Tensor& seed);

  void zero_adjoints();

  const Tensor& value(Slot s) const { return values_.at(static_cast<size_t>(s.id)); }
  Tensor& mutable_value(Slot s) { return values_.at(static_cast<size_t>(s.id)); }
  const Tensor& adjoint(Slot s) const { return adjoints_.at(static_cast<size_t>(s.id)); }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  struct Node {
    std::string op;  // empty for leaves
    std::vector<int> inputs;
    std::vector<Tensor> saved;
    std::shared_ptr<const void> extra;
  };

  void check(Slot s) const;

  std::vector<Tensor> values_;
  std::vector<Tensor> adjoints_;
  std::vector<Node> nodes_;
};

}  // namespace gap::grad

#endif  // GAPSIM_GRAD_TAPE_HPP_
