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

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

namespace afa {
namespace {

TEST(GaussLegendre, NodesAndWeightsIntegrateConstants) {
  const auto& nodes = GaussLegendreNodes(30);
  const auto& weights = GaussLegendreWeights(30);
  ASSERT_EQ(nodes.size(), 30u);
  double total = 0.0;
  for (double w : weights) total += w;
  EXPECT_NEAR(total, 2.0, 1e-14);
  // Polynomial exactness up to degree 2n-1.
  double moment = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    moment += weights[i] * std::pow(nodes[i], 10);
  }
  EXPECT_NEAR(moment, 2.0 / 11.0, 1e-14);
}

TEST(Integrate, PolynomialIsExact) {
  const QuadResult r = Integrate([](double x) { return x * x; }, 0.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-14);
}

TEST(Integrate, SinOverHalfPeriod) {
  const QuadResult r =
      Integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-12);
}

TEST(Integrate, ZeroFunction) {
  const QuadResult r = Integrate([](double) { return 0.0; }, 0.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.value, 0.0);
}

TEST(Integrate, OscillatoryNeedsPanels) {
  const QuadResult r =
      Integrate([](double x) { return std::cos(40.0 * x); }, 0.0, 10.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::sin(400.0) / 40.0, 1e-11);
}

TEST(Integrate, BudgetExhaustionSetsFlag) {
  QuadConfig cfg;
  cfg.abs_tol = 1e-15;
  cfg.max_panels = 4;
  const QuadResult r = Integrate(
      [](double x) { return std::cos(200.0 * x) / std::sqrt(x + 1e-9); }, 0.0,
      10.0, cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.err_estimate, 0.0);
}

TEST(MapInfinite, NormalDensityNormalizes) {
  const auto density = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  };
  const QuadResult r = Integrate(MapInfinite(density), -1.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(MapInfinite, OddFunctionVanishes) {
  const auto odd = [](double x) { return x * std::exp(-x * x); };
  const QuadResult r = Integrate(MapInfinite(odd), -1.0, 1.0);
  EXPECT_NEAR(r.value, 0.0, 1e-12);
}

TEST(MapInfinite, ShiftedWideNormalNormalizes) {
  const auto density = [](double x) {
    const double z = (x - 3.0) / 2.0;
    return std::exp(-0.5 * z * z) / (2.0 * std::sqrt(2.0 * std::numbers::pi));
  };
  const QuadResult r = Integrate(MapInfinite(density), -1.0, 1.0);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

}  // namespace
}  // namespace afa
