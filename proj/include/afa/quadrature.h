// Copyright 2026 The AFA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef AFA_QUADRATURE_H_
#define AFA_QUADRATURE_H_

#include <functional>
#include <vector>

namespace afa {

struct QuadConfig {
  double abs_tol = 1e-12;
  int max_panels = 2048;
  int nodes_per_panel = 30;
};

struct QuadResult {
  double value = 0.0;
  double err_estimate = 0.0;
  bool converged = true;
  int panels_used = 0;
};

// Gauss-Legendre nodes/weights on (-1, 1), computed once per order by Newton
// iteration on the Legendre recurrence and cached.
const std::vector<double>& GaussLegendreNodes(int n);
const std::vector<double>& GaussLegendreWeights(int n);

// Adaptive Gauss-Legendre integration of f over (a, b). Panels are split
// until the per-panel estimate (difference between the n-point rule and the
// embedded n/2-point rule) sums below cfg.abs_tol. The rule is open: the
// endpoints a and b are never sampled, so removable endpoint singularities
// are fine. `breakpoints` seeds an initial subdivision (values outside (a, b)
// are ignored). If the panel budget runs out the best value is returned with
// converged = false.
QuadResult Integrate(const std::function<double(double)>& f, double a,
                     double b, const QuadConfig& cfg = QuadConfig(),
                     const std::vector<double>& breakpoints = {});

// Change of variables x = u / (1 - u^2) mapping an integral over the whole
// real line to (-1, 1): returns u -> f(u/(1-u^2)) * (1+u^2)/(1-u^2)^2.
std::function<double(double)> MapInfinite(std::function<double(double)> f);

}  // namespace afa

#endif  // AFA_QUADRATURE_H_
