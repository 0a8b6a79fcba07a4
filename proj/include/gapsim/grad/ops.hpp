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

#ifndef GAPSIM_GRAD_OPS_HPP_
#define GAPSIM_GRAD_OPS_HPP_

#include <vector>

#include "gapsim/grad/tape.hpp"

namespace gap::grad::ops {

// Elementwise; shapes must match.
Slot add(Tape& t, Slot a, Slot b);
Slot sub(Tape& t, Slot a, Slot b);
Slot mul(Tape& t, Slot a, Slot b);
Slot square(Tape& t, Slot a);

// y = c * a for a compile-time constant c (no gradient to c).
Slot scale(Tape& t, Slot a, double c);

// Reductions to scalars.
Slot sum(Tape& t, Slot a);
Slot abs_sum(Tape& t, Slot a);  // sum |x_i|, subgradient 0 at 0
Slot sq_sum(Tape& t, Slot a);   // sum x_i^2

// Scalar y = sum_i w_i * x_i over scalar slots.
Slot weighted_sum(Tape& t, const std::vector<Slot>& xs,
                  const std::vector<double>& weights);

// Flat sub-range [offset, offset+len) viewed as shape `shape`.
Slot slice(Tape& t, Slot a, int offset, int len, std::vector<int> shape);

}  // namespace gap::grad::ops

#endif  // GAPSIM_GRAD_OPS_HPP_
