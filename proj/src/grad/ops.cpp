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

#include "gapsim/grad/ops.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace gap::grad {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.shape_str() + " vs " + b.shape_str());
}

struct SliceCtx {
  int offset = 0;
  int len = 0;
};

void do_register_builtins() {
  register_primitive("add", [](const VjpArgs& a) {
    for (int64_t i = 0; i < a.upstream.numel(); ++i) {
      (*a.input_adjoints[0])[i] += a.upstream[i];
      (*a.input_adjoints[1])[i] += a.upstream[i];
    }
  });
  register_primitive("sub", [](const VjpArgs& a) {
    for (int64_t i = 0; i < a.upstream.numel(); ++i) {
      (*a.input_adjoints[0])[i] += a.upstream[i];
      (*a.input_adjoints[1])[i] -= a.upstream[i];
    }
  });
  register_primitive("mul", [](const VjpArgs& a) {
    const Tensor& x = *a.input_values[0];
    const Tensor& y = *a.input_values[1];
    for (int64_t i = 0; i < a.upstream.numel(); ++i) {
      (*a.input_adjoints[0])[i] += a.upstream[i] * y[i];
      (*a.input_adjoints[1])[i] += a.upstream[i] * x[i];
    }
  });
  register_primitive("square", [](const VjpArgs& a) {
    const Tensor& x = *a.input_values[0];
    for (int64_t i = 0; i < a.upstream.numel(); ++i)
      (*a.input_adjoints[0])[i] += 2.0 * x[i] * a.upstream[i];
  });
  register_primitive("scale", [](const VjpArgs& a) {
    const double c = a.saved[0].item();
    for (int64_t i = 0; i < a.upstream.numel(); ++i)
      (*a.input_adjoints[0])[i] += c * a.upstream[i];
  });
  register_primitive("sum", [](const VjpArgs& a) {
    const double u = a.upstream.item();
    Tensor& g = *a.input_adjoints[0];
    for (int64_t i = 0; i < g.numel(); ++i) g[i] += u;
  });
  register_primitive("abs_sum", [](const VjpArgs& a) {
    const double u = a.upstream.item();
    const Tensor& x = *a.input_values[0];
    Tensor& g = *a.input_adjoints[0];
    for (int64_t i = 0; i < g.numel(); ++i) {
      if (x[i] > 0.0)
        g[i] += u;
      else if (x[i] < 0.0)
        g[i] -= u;
    }
  });
  register_primitive("sq_sum", [](const VjpArgs& a) {
    const double u = a.upstream.item();
    const Tensor& x = *a.input_values[0];
    Tensor& g = *a.input_adjoints[0];
    for (int64_t i = 0; i < g.numel(); ++i) g[i] += 2.0 * x[i] * u;
  });
  register_primitive("weighted_sum", [](const VjpArgs& a) {
    const double u = a.upstream.item();
    const Tensor& w = a.saved[0];
    for (size_t k = 0; k < a.input_adjoints.size(); ++k)
      (*a.input_adjoints[k])[0] += u * w[static_cast<int64_t>(k)];
  });
  register_primitive("slice", [](const VjpArgs& a) {
    const auto* ctx = static_cast<const SliceCtx*>(a.extra);
    Tensor& g = *a.input_adjoints[0];
    for (int i = 0; i < ctx->len; ++i) g[ctx->offset + i] += a.upstream[i];
  });
}

}  // namespace

void register_builtin_primitives() {
  static std::once_flag once;
  std::call_once(once, do_register_builtins);
}

namespace ops {

Slot add(Tape& t, Slot a, Slot b) {
  const Tensor &x = t.value(a), &y = t.value(b);
  check_same_shape(x, y, "add");
  Tensor out = Tensor::zeros_like(x);
  for (int64_t i = 0; i < x.numel(); ++i) out[i] = x[i] + y[i];
  return t.record("add", {a, b}, std::move(out));
}

Slot sub(Tape& t, Slot a, Slot b) {
  const Tensor &x = t.value(a), &y = t.value(b);
  check_same_shape(x, y, "sub");
  Tensor out = Tensor::zeros_like(x);
  for (int64_t i = 0; i < x.numel(); ++i) out[i] = x[i] - y[i];
  return t.record("sub", {a, b}, std::move(out));
}

Slot mul(Tape& t, Slot a, Slot b) {
  const Tensor &x = t.value(a), &y = t.value(b);
  check_same_shape(x, y, "mul");
  Tensor out = Tensor::zeros_like(x);
  for (int64_t i = 0; i < x.numel(); ++i) out[i] = x[i] * y[i];
  return t.record("mul", {a, b}, std::move(out));
}

Slot square(Tape& t, Slot a) {
  const Tensor& x = t.value(a);
  Tensor out = Tensor::zeros_like(x);
  for (int64_t i = 0; i < x.numel(); ++i) out[i] = x[i] * x[i];
  return t.record("square", {a}, std::move(out));
}

Slot scale(Tape& t, Slot a, double c) {
  const Tensor& x = t.value(a);
  Tensor out = Tensor::zeros_like(x);
  for (int64_t i = 0; i < x.numel(); ++i) out[i] = c * x[i];
  return t.record("scale", {a}, std::move(out), {Tensor::scalar(c)});
}

Slot sum(Tape& t, Slot a) {
  const Tensor& x = t.value(a);
  double s = 0.0;
  for (int64_t i = 0; i < x.numel(); ++i) s += x[i];
  return t.record("sum", {a}, Tensor::scalar(s));
}

Slot abs_sum(Tape& t, Slot a) {
  const Tensor& x = t.value(a);
  double s = 0.0;
  for (int64_t i = 0; i < x.numel(); ++i) s += std::abs(x[i]);
  return t.record("abs_sum", {a}, Tensor::scalar(s));
}

Slot sq_sum(Tape& t, Slot a) {
  const Tensor& x = t.value(a);
  double s = 0.0;
  for (int64_t i = 0; i < x.numel(); ++i) s += x[i] * x[i];
  return t.record("sq_sum", {a}, Tensor::scalar(s));
}

Slot weighted_sum(Tape& t, const std::vector<Slot>& xs,
                  const std::vector<double>& weights) {
  if (xs.size() != weights.size() || xs.empty())
    throw std::invalid_argument("weighted_sum: needs matching nonempty lists");
  double s = 0.0;
  Tensor w({static_cast<int>(weights.size())});
  for (size_t i = 0; i < xs.size(); ++i) {
    s += weights[i] * t.value(xs[i]).item();
    w[static_cast<int64_t>(i)] = weights[i];
  }
  return t.record("weighted_sum", xs, Tensor::scalar(s), {std::move(w)});
}

Slot slice(Tape& t, Slot a, int offset, int len, std::vector<int> shape) {
  const Tensor& x = t.value(a);
  if (offset < 0 || offset + len > x.numel() ||
      Tensor::numel_of(shape) != len)
    throw std::invalid_argument("slice: bad range");
  Tensor out(std::move(shape));
  std::memcpy(out.data(), x.data() + offset, sizeof(double) * len);
  auto ctx = std::make_shared<SliceCtx>();
  ctx->offset = offset;
  ctx->len = len;
  return t.record("slice", {a}, std::move(out), {}, std::move(ctx));
}

}  // namespace ops
}  // namespace gap::grad
