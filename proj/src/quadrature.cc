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
#include "afa/quadrature.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace afa {

namespace {

std::atomic<bool> g_parallel_enabled{true};

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Classic gauleg: roots of P_n by Newton iteration starting from the
// Chebyshev estimate. Symmetric pairs are filled together.
GaussLegendreRule ComputeRule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussLegendreRule& CachedRule(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    if (n < 2) throw std::invalid_argument("Gauss-Legendre order must be >= 2");
    it = cache.emplace(n, ComputeRule(n)).first;
  }
  return it->second;
}

double ApplyRule(const std::function<double(double)>& f, double a, double b,
                 const GaussLegendreRule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return acc * half;
}

}  // namespace

void SetParallelEnabled(bool enabled) { g_parallel_enabled.store(enabled); }
bool ParallelEnabled() { return g_parallel_enabled.load(); }

const std::vector<double>& GaussLegendreNodes(int n) {
  return CachedRule(n).nodes;
}
const std::vector<double>& GaussLegendreWeights(int n) {
  return CachedRule(n).weights;
}

QuadResult Integrate(const std::function<double(double)>& f, double a,
                     double b, const QuadConfig& cfg,
                     const std::vector<double>& breakpoints) {
  QuadResult result;
  if (!(a < b)) {
    if (a == b) return result;
    throw std::invalid_argument("Integrate: requires a <= b");
  }
  const GaussLegendreRule& fine = CachedRule(cfg.nodes_per_panel);
  const GaussLegendreRule& coarse = CachedRule(std::max(2, cfg.nodes_per_panel / 2));

  std::vector<double> edges;
  edges.push_back(a);
  for (double x : breakpoints) {
    if (x > a && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  struct Panel {
    double lo, hi;
  };
  std::vector<Panel> work;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    work.push_back({edges[i], edges[i + 1]});
  }

  const double total_len = b - a;
  const double min_width = total_len * 1e-14;
  int panels = 0;
  while (!work.empty()) {
    const Panel p = work.back();
    work.pop_back();
    ++panels;
    const double v_fine = ApplyRule(f, p.lo, p.hi, fine);
    const double v_coarse = ApplyRule(f, p.lo, p.hi, coarse);
    const double err = std::abs(v_fine - v_coarse);
    const double budget = cfg.abs_tol * (p.hi - p.lo) / total_len;
    const bool out_of_panels =
        panels + static_cast<int>(work.size()) >= cfg.max_panels;
    if (err <= budget || (p.hi - p.lo) < min_width || out_of_panels) {
      result.value += v_fine;
      result.err_estimate += err;
      if (err > budget && (p.hi - p.lo) >= min_width) result.converged = false;
      continue;
    }
    const double mid = 0.5 * (p.lo + p.hi);
    work.push_back({p.lo, mid});
    work.push_back({mid, p.hi});
  }
  result.panels_used = panels;
  return result;
}

std::function<double(double)> MapInfinite(std::function<double(double)> f) {
  return [f = std::move(f)](double u) {
    const double om = 1.0 - u * u;
    const double x = u / om;
    return f(x) * (1.0 + u * u) / (om * om);
  };
}

}  // namespace afa
