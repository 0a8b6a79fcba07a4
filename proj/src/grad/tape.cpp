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

#include "gapsim/grad/tape.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace gap {

bool Tensor::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::string s = "[";
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

namespace grad {

namespace {
std::unordered_map<std::string, VjpFn>& registry() {
  static std::unordered_map<std::string, VjpFn> r;
  return r;
}
}  // namespace

void register_primitive(const std::string& op, VjpFn vjp) {
  registry()[op] = std::move(vjp);
}

bool primitive_registered(const std::string& op) {
  return registry().count(op) > 0;
}

const VjpFn& primitive_vjp(const std::string& op) {
  auto it = registry().find(op);
  if (it == registry().end())
    throw std::invalid_argument("unknown primitive: " + op);
  return it->second;
}

void Tape::check(Slot s) const {
  if (!s.valid() || s.id >= static_cast<int>(values_.size()))
    throw std::invalid_argument("Tape: slot not on this tape");
}

Slot Tape::leaf(Tensor value) {
  values_.push_back(std::move(value));
  adjoints_.emplace_back(Tensor::zeros_like(values_.back()));
  nodes_.push_back(Node{});
  return Slot{static_cast<int>(values_.size()) - 1};
}

Slot Tape::record(const std::string& op, const std::vector<Slot>& inputs,
                  Tensor value, std::vector<Tensor> saved,
                  std::shared_ptr<const void> extra) {
  primitive_vjp(op);  // reject unknown ids up front
  Node node;
  node.op = op;
  node.inputs.reserve(inputs.size());
  for (Slot s : inputs) {
    check(s);
    node.inputs.push_back(s.id);
  }
  node.saved = std::move(saved);
  node.extra = std::move(extra);
  values_.push_back(std::move(value));
  adjoints_.emplace_back(Tensor::zeros_like(values_.back()));
  nodes_.push_back(std::move(node));
  return Slot{static_cast<int>(values_.size()) - 1};
}

void Tape::backward(Slot root, const Tensor& seed) {
  check(root);
  if (!seed.same_shape(values_[static_cast<size_t>(root.id)]))
    throw std::invalid_argument("Tape::backward: seed shape mismatch");

  Tensor& root_adj = adjoints_[static_cast<size_t>(root.id)];
  for (int64_t i = 0; i < seed.numel(); ++i) root_adj[i] += seed[i];

  std::vector<char> live(values_.size(), 0);
  live[static_cast<size_t>(root.id)] = 1;

  for (int id = root.id; id >= 0; --id) {
    if (!live[static_cast<size_t>(id)]) continue;
    const Node& node = nodes_[static_cast<size_t>(id)];
    if (node.op.empty()) continue;  // leaf

    std::vector<const Tensor*> in_vals;
    std::vector<Tensor*> in_adjs;
    in_vals.reserve(node.inputs.size());
    in_adjs.reserve(node.inputs.size());
    for (int in : node.inputs) {
      in_vals.push_back(&values_[static_cast<size_t>(in)]);
      in_adjs.push_back(&adjoints_[static_cast<size_t>(in)]);
      live[static_cast<size_t>(in)] = 1;
    }
    VjpArgs args{adjoints_[static_cast<size_t>(id)],
                 std::span<const Tensor* const>(in_vals),
                 std::span<Tensor* const>(in_adjs), node.saved,
                 node.extra.get()};
    primitive_vjp(node.op)(args);
  }
}

void Tape::zero_adjoints() {
  for (Tensor& a : adjoints_) a.set_zero();
}

}  // namespace grad
}  // namespace gap
