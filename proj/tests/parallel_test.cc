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
//
// The OpenMP kernels and the serial reference path must agree bit for bit:
// both run the same fixed block decomposition and combine partials in block
// order.

#include "afa/parallel.h"

#include <cmath>
#include <complex>

#include "gtest/gtest.h"
#include "afa/grid_pld.h"
#include "afa/levy.h"
#include "afa/phi.h"

namespace afa {
namespace {

TEST(Parallel, BlockSumMatchesSerialBitwise) {
  const std::size_t n = 100001;
  const auto term = [](std::size_t i) {
    return std::sin(0.001 * static_cast<double>(i));
  };
  SetParallelEnabled(true);
  const double parallel = BlockSum<double>(n, term);
  SetParallelEnabled(false);
  const double serial = BlockSum<double>(n, term);
  SetParallelEnabled(true);
  EXPECT_EQ(parallel, serial);
}

TEST(Parallel, ComplexBlockSumMatchesSerialBitwise) {
  const std::size_t n = 50000;
  const auto term = [](std::size_t i) {
    const double x = 1e-4 * static_cast<double>(i);
    return std::complex<double>(std::cos(x), std::sin(x));
  };
  SetParallelEnabled(true);
  const std::complex<double> parallel = BlockSum<std::complex<double>>(n, term);
  SetParallelEnabled(false);
  const std::complex<double> serial = BlockSum<std::complex<double>>(n, term);
  SetParallelEnabled(true);
  EXPECT_EQ(parallel.real(), serial.real());
  EXPECT_EQ(parallel.imag(), serial.imag());
}

TEST(Parallel, GridPhiMatchesSerialBitwise) {
  SubsampledGaussianSpec spec;
  spec.sigma = 2.0;
  spec.gamma = 0.01;
  spec.direction = MixtureDirection::kRemove;
  SetParallelEnabled(true);
  const GridPld grid_par = BuildGrid(spec, 20.0, 20000);
  SetParallelEnabled(false);
  const GridPld grid_ser = BuildGrid(spec, 20.0, 20000);
  SetParallelEnabled(true);
  ASSERT_EQ(grid_par.log_mass_p.size(), grid_ser.log_mass_p.size());
  for (std::size_t i = 0; i < grid_par.log_mass_p.size(); i += 997) {
    EXPECT_EQ(grid_par.log_mass_p[i], grid_ser.log_mass_p[i]);
    EXPECT_EQ(grid_par.loss_hi[i], grid_ser.loss_hi[i]);
  }
  for (double t : {0.0, 0.37, 2.0, 11.5}) {
    SetParallelEnabled(true);
    const std::complex<double> a =
        PhiBounds(grid_par, t, Direction::kP, Side::kLo);
    SetParallelEnabled(false);
    const std::complex<double> b =
        PhiBounds(grid_ser, t, Direction::kP, Side::kLo);
    SetParallelEnabled(true);
    EXPECT_EQ(a.real(), b.real());
    EXPECT_EQ(a.imag(), b.imag());
  }
}

TEST(Parallel, LevyCdfMatchesSerialBitwise) {
  LogPhiLedger ledger;
  ledger = ledger.Append(PhiTerm::Gaussian(1.0), 3);
  SetParallelEnabled(true);
  const LevyResult a = LevyCdf(ledger, Direction::kP, 1.0);
  SetParallelEnabled(false);
  const LevyResult b = LevyCdf(ledger, Direction::kP, 1.0);
  SetParallelEnabled(true);
  EXPECT_EQ(a.value, b.value);
}

}  // namespace
}  // namespace afa
