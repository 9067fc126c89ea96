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
#ifndef AFA_LEVY_H_
#define AFA_LEVY_H_

#include "afa/phi.h"
#include "afa/quadrature.h"

namespace afa {

// Roundoff of a numerically-summed phi term is amplified by the composition
// multiplicity; this is the per-composition noise floor used both as the
// minimum certifiable quadrature tolerance and as the numeric slack of the
// certified sandwich bounds.
inline constexpr double kCompositionNoisePerTerm = 3e-14;

struct LevyResult {
  double value = 0.0;
  double err_estimate = 0.0;
  bool converged = true;
};

// CDF of the finite part of the composed loss in the given direction,
// recovered from the ledger by Levy inversion. Conjugate symmetry folds the
// two-sided integral onto (0, inf):
//   F_norm(x) = 1/2 - (1/pi) int_0^inf Im(e^{-itx} phi_norm(t)) / t dt,
// where phi_norm is the phi of the loss normalized to total mass 1; the
// result is scaled back and clamped to [0, 1 - Pr[L = inf]]. The half-line
// is mapped to u in (0,1) and panels are seeded at the zero spacing pi/|x|
// of the oscillating factor; there is no a-priori truncation point.
LevyResult LevyCdf(const LogPhiLedger& ledger, Direction dir, double x,
                   const QuadConfig& cfg = QuadConfig());

struct DeltaResult {
  double delta = 0.0;
  double err_estimate = 0.0;
  bool converged = true;
};

// delta(eps) of the composed mechanism:
//   delta_P = Pr[L_P = inf] + Pr[eps < L_P < inf] - e^eps Pr[L_Q < -eps]
// and symmetrically delta_Q; the query returns max(delta_P, delta_Q)
// clamped to [0, 1]. Ledgers whose composed loss is a finite discrete
// measure within `stairs_cap` atoms are answered by exact summation (the
// Levy limit of a discrete measure); everything else goes through LevyCdf.
DeltaResult DeltaFromLedger(const LogPhiLedger& ledger, double eps,
                            const QuadConfig& cfg = QuadConfig(),
                            std::size_t stairs_cap = (1u << 20));

}  // namespace afa

#endif  // AFA_LEVY_H_
