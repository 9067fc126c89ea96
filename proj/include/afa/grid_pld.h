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
#ifndef AFA_GRID_PLD_H_
#define AFA_GRID_PLD_H_

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "afa/levy.h"
#include "afa/phi.h"

// Grid approximation of continuous privacy-loss random variables: per-cell
// mass and loss envelopes yielding phi-/phi+ and certified delta lower/upper
// bounds with tail-error accounting.

namespace afa {

enum class Side { kLo, kHi };

struct SubsampledGaussianSpec {
  double sigma = 1.0;
  double gamma = 1.0;
  MixtureDirection direction = MixtureDirection::kRemove;
};

// Custom continuous pair: log densities and the loss L_{P,Q} over the output
// line. Either the loss must be certified monotone on cells or per-cell
// extremum callables must be supplied; a per-composition tail bound (log
// domain) is required as well.
struct CustomDensitySpec {
  std::function<double(double)> log_p;
  std::function<double(double)> log_q;
  std::function<double(double)> loss;
  bool loss_monotone = false;
  // Optional: (cell_lo, cell_hi) -> (min L, max L) over the cell.
  std::function<std::pair<double, double>(double, double)> cell_extrema;
  double log_tail_per_composition = 0.0;
};

struct GridPld {
  double S = 0.0;
  long N = 0;
  double delta_o = 0.0;
  // Left-point Riemann masses p(o_j) * delta_o (log domain) and the per-cell
  // loss envelope of L_{P,Q}.
  std::vector<double> log_mass_p;
  std::vector<double> log_mass_q;
  std::vector<double> loss_lo;
  std::vector<double> loss_hi;
  double log_tail_per_composition = 0.0;
  double mass_p = 0.0;
  double mass_q = 0.0;

  double TailMassBound() const { return std::exp(log_tail_per_composition); }

  // Ledger terms for the two envelope sides, built once so their phi caches
  // persist across queries.
  const PhiTerm& Term(Side side) const;

 private:
  friend GridPld BuildGrid(const SubsampledGaussianSpec&, double, long);
  friend GridPld BuildGrid(const CustomDensitySpec&, double, long);
  mutable std::optional<PhiTerm> lo_term_;
  mutable std::optional<PhiTerm> hi_term_;
};

// Cells o_j = -S + j * delta_o with delta_o = 2S/N; mass of cell j is the
// left-point density times delta_o, and the loss envelope comes from the
// cell endpoints (valid under the monotonicity certificate).
GridPld BuildGrid(const SubsampledGaussianSpec& spec, double S, long N);
GridPld BuildGrid(const CustomDensitySpec& spec, double S, long N);

// phi-(t) / phi+(t) of the grid in one direction: discrete sum over cells
// using loss_lo (kLo) or loss_hi (kHi).
std::complex<double> PhiBounds(const GridPld& grid, double t, Direction dir,
                               Side side);

// log(delta_tail) for the subsampled-Gaussian mixture truncated at [-S, S]:
// delta_tail = e^{-S^2/(2 sigma^2)} + e^{-(S-1)^2/(2 sigma^2)}.
double LogTailBound(double sigma, double S);
// k * delta_tail; gamma does not enter the bound (both mixture components
// share sigma) and is accepted for interface uniformity.
double TailBound(double sigma, double gamma, double S, long k);

struct SandwichResult {
  double delta_lo = 0.0;
  double delta_hi = 0.0;
  double err_estimate = 0.0;
  bool converged = true;
};

// Certified bracket of delta(eps) for the k-fold composition: the delta
// query is run once with the phi- pair and once with the phi+ pair, then
// widened by k * delta_tail on each side. The lower bound is clamped at 0.
SandwichResult DeltaSandwich(const GridPld& grid, long k, double eps,
                             const QuadConfig& cfg = QuadConfig());

}  // namespace afa

#endif  // AFA_GRID_PLD_H_
