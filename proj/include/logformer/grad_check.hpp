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

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "logformer/error.hpp"
#include "logformer/rng.hpp"
#include "logformer/tensor.hpp"

namespace logformer {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates_checked = 0;
};

/// Compares autodiff gradients of a scalar loss against central differences
/// (f(x + eps e_i) - f(x - eps e_i)) / (2 eps) on up to `samples` randomly
/// chosen coordinates of every tensor in `inputs` (all coordinates when the
/// tensor is smaller). Relative error per coordinate is
/// |a - n| / max(|a|, |n|, r) where r = 8e6 * machine_eps * max(1, |f|) / (2 eps).
/// Inputs must require gradients.
inline GradCheckReport grad_check(const std::function<Tensor<double>()>& loss_fn,
                                  std::vector<Tensor<double>> inputs,
                                  std::vector<std::string> names = {}, double eps = 1e-5,
                                  std::size_t samples = 50, std::uint64_t seed = 0) {
  for (auto& t : inputs) {
    if (!t.requires_grad()) throw RuntimeError("grad_check: input does not require grad");
    t.clear_grad();
  }
  double loss_scale = 1.0;
  {
    const auto loss = loss_fn();
    if (!std::isfinite(loss.item())) throw RuntimeError("grad_check: non-finite loss");
    loss_scale = std::max(1.0, std::abs(loss.item()));
    backward(loss);
  }
  // Smallest gradient magnitude that eight rounding steps of the loss keep
  // within 1e-6 relative error; smaller components are measured against it.
  const double resolution =
      8e6 * std::numeric_limits<double>::epsilon() * loss_scale / (2.0 * eps);

  auto eval = [&] {
    NoGradGuard guard;
    const double v = loss_fn().item();
    if (!std::isfinite(v)) throw RuntimeError("grad_check: non-finite loss under perturbation");
    return v;
  };

  GradCheckReport report;
  Rng rng(seed);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    auto& x = inputs[t];
    const std::string name = t < names.size() ? names[t] : "input" + std::to_string(t);
    std::vector<std::size_t> coords(x.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > samples) {
      rng.shuffle(coords.begin(), coords.end());
      coords.resize(samples);
    }
    auto values = x.data();
    for (std::size_t idx : coords) {
      const double analytic = x.has_grad() ? x.grad()[idx] : 0.0;
      const double saved = values[idx];
      values[idx] = saved + eps;
      const double up = eval();
      values[idx] = saved - eps;
      const double down = eval();
      values[idx] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      if (!std::isfinite(analytic)) throw RuntimeError("grad_check: non-finite gradient");
      const double denom = std::max({std::abs(analytic), std::abs(numeric), resolution});
      const double rel = std::abs(analytic - numeric) / denom;
      ++report.coordinates_checked;
      if (rel > report.max_rel_error || report.coordinates_checked == 1) {
        report.max_rel_error = rel;
        report.worst_tensor = name;
        report.worst_index = idx;
        report.worst_analytic = analytic;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

/// Single-tensor convenience form returning only the maximum relative error.
inline double grad_check(const std::function<Tensor<double>(const Tensor<double>&)>& f,
                         Tensor<double> x, double eps = 1e-5, std::size_t samples = 50,
                         std::uint64_t seed = 0) {
  return grad_check([&] { return f(x); }, {x}, {"x"}, eps, samples, seed).max_rel_error;
}

}  // namespace logformer
