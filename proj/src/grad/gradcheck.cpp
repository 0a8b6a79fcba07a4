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

#include "gapsim/grad/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace gap::grad {

namespace {

double eval_forward(const TapeProgram& f, const std::vector<Tensor>& inputs) {
  Tape tape;
  std::vector<Slot> leaves;
  leaves.reserve(inputs.size());
  for (const Tensor& in : inputs) leaves.push_back(tape.leaf(in));
  Slot root = f(tape, leaves);
  return tape.value(root).item();
}

}  // namespace

nlohmann::json GradCheckReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const GradCheckRow& r : rows) {
    rows_json.push_back({{"op", r.op},
                         {"input", r.input},
                         {"coord", r.coord},
                         {"analytic", r.analytic},
                         {"numeric", r.numeric},
                         {"rel_error", r.rel_error},
                         {"pass", r.pass},
                         {"testable", r.testable}});
  }
  return {{"op", op},
          {"max_rel_error", max_rel_error},
          {"passed", passed},
          {"coords", rows_json}};
}

GradCheckReport gradcheck(const std::string& op, const TapeProgram& f,
                          const std::vector<Tensor>& inputs, double eps,
                          double tol) {
  if (eps <= 0.0) throw std::invalid_argument("gradcheck: eps must be > 0");

  GradCheckReport report;
  report.op = op;

  // Analytic gradients from one forward + backward sweep.
  Tape tape;
  std::vector<Slot> leaves;
  for (const Tensor& in : inputs) leaves.push_back(tape.leaf(in));
  Slot root = f(tape, leaves);
  if (tape.value(root).numel() != 1)
    throw std::invalid_argument("gradcheck: program must be scalar-valued");
  tape.backward(root, Tensor::scalar(1.0));

  for (size_t k = 0; k < inputs.size(); ++k) {
    const Tensor& adj = tape.adjoint(leaves[k]);
    for (int64_t i = 0; i < inputs[k].numel(); ++i) {
      GradCheckRow row;
      row.op = op;
      row.input = static_cast<int>(k);
      row.coord = static_cast<int>(i);
      row.analytic = adj[i];

      const double x0 = inputs[k][i];
      const double h = eps * std::max(1.0, std::abs(x0));
      std::vector<Tensor> probe = inputs;
      probe[k][i] = x0 + h;
      const double fp = eval_forward(f, probe);
      probe[k][i] = x0 - h;
      const double fm = eval_forward(f, probe);

      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        row.testable = false;
        row.pass = true;  // untestable, not failed
      } else {
        row.numeric = (fp - fm) / (2.0 * h);
        row.rel_error = std::abs(row.analytic - row.numeric) /
                        std::max({1.0, std::abs(row.analytic),
                                  std::abs(row.numeric)});
        row.pass = row.rel_error <= tol;
        report.max_rel_error = std::max(report.max_rel_error, row.rel_error);
      }
      report.passed = report.passed && row.pass;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace gap::grad
