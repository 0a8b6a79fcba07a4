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

#ifndef GAPSIM_GRAD_GRADCHECK_HPP_
#define GAPSIM_GRAD_GRADCHECK_HPP_

#include <functional>
#include <string>
#include <vector>

#include "gapsim/grad/tape.hpp"

#include "json.hpp"

namespace gap::grad {

// Builds a scalar-valued program over leaf slots created from the inputs.
using TapeProgram = std::function<Slot(Tape&, const std::vector<Slot>&)>;

struct GradCheckRow {
  std::string op;
  int input = 0;   // which input tensor
  int coord = 0;   // flat coordinate within that input
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
  bool pass = true;
  bool testable = true;  // false when f was non-finite at a probe point
};

struct GradCheckReport {
  std::string op;
  double max_rel_error = 0.0;
  bool passed = true;
  std::vector<GradCheckRow> rows;
  nlohmann::json to_json() const;
};

// Central-difference check of the tape adjoint of a scalar program.
// Per-coordinate step is eps * max(1, |x_i|); relative error is
// |a - g| / max(1, |a|, |g|). Non-finite probes mark the coordinate
// untestable rather than failed.
GradCheckReport gradcheck(const std::string& op, const TapeProgram& f,
                          const std::vector<Tensor>& inputs, double eps,
                          double tol);

}  // namespace gap::grad

#endif  // GAPSIM_GRAD_GRADCHECK_HPP_
