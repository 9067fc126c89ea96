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
#ifndef AFA_ACCOUNTANT_H_
#define AFA_ACCOUNTANT_H_

#include <optional>
#include <vector>

#include "afa/divergence.h"
#include "afa/dominating_pair.h"
#include "afa/levy.h"
#include "afa/phi.h"

// The analytical Fourier accountant: a mechanism ledger with delta(eps) and
// eps(delta) queries, plus the RDP baseline accountant and its conversions.

namespace afa {

enum class DirectionPolicy { kAdd, kRemove, kBoth };

struct SamplingSpec {
  SamplingKind kind = SamplingKind::kPoisson;
  double gamma = 1.0;
  DirectionPolicy policy = DirectionPolicy::kBoth;
};

enum class MechanismKind { kGaussian, kLaplace, kRandomizedResponse, kDiscrete };

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kGaussian;
  double sigma = 1.0;   // gaussian
  double lambda = 1.0;  // laplace
  double p = 0.75;      // randomized response
  std::optional<DiscretePair> pair;  // discrete
  long count = 1;
  Relation relation = Relation::kSymmetric;
  std::optional<SamplingSpec> sampling;  // gaussian only
};

// Queries never mutate; Add builds the ledger up front. Subsampled
// mechanisms under the kBoth policy are tracked in two ledgers (the add-pair
// and remove-pair compositions) whose delta curves are combined by pointwise
// max; each ledger's query itself takes max(delta_P, delta_Q) over the two
// loss orientations.
class Accountant {
 public:
  explicit Accountant(QuadConfig quad = QuadConfig()) : quad_(quad) {}

  void Add(const MechanismSpec& spec);

  DeltaResult DeltaOfEps(double eps) const;
  // Bisection on eps: returns 0 when delta(0) <= delta already; throws
  // std::invalid_argument when delta is not above the mass-at-infinity floor
  // (no finite eps exists). Absolute tolerance 1e-8 on eps.
  double EpsOfDelta(double delta) const;

  double InfMassFloor() const;
  const QuadConfig& quad_config() const { return quad_; }

 private:
  QuadConfig quad_;
  LogPhiLedger remove_ledger_;
  LogPhiLedger add_ledger_;
  bool use_add_ = true;
  bool use_remove_ = true;
};

// Renyi divergence curve eps(alpha) of one mechanism, evaluable on
// (0,1) u {1} u (1, inf).
class RdpCurve {
 public:
  static RdpCurve Gaussian(double sigma);
  static RdpCurve Discrete(DiscretePair pair);
  // Numeric curve from log densities over the real line.
  static RdpCurve Numeric(std::function<double(double)> log_p,
                          std::function<double(double)> log_q);
  static RdpCurve SubsampledGaussian(double sigma, double gamma,
                                     MixtureDirection dir);

  double EpsOfAlpha(double alpha) const;

 private:
  std::function<double(double)> eps_of_alpha_;
};

struct WeightedRdpCurve {
  RdpCurve curve;
  long count = 1;
};

// Classical RDP -> (eps, delta) conversion of a composition:
// min over alpha of sum_i k_i eps_i(alpha) + log(1/delta)/(alpha - 1),
// scanned on a log-spaced grid over (1, 1e6] and refined by golden section.
double RdpComposeConvertClassical(const std::vector<WeightedRdpCurve>& curves,
                                  double delta);

// Trade-off function implied by an RDP curve: for each alpha on the grid
// {0.5 + j/64} u {1} u log-spaced (1, 1e6], the minimal type II error
// satisfying both moment constraints is root-found, the pointwise max over
// alpha is taken, and the result is convexified over a type-I grid.
TradeoffFn RdpToTradeoff(const std::vector<WeightedRdpCurve>& curves);
double RdpToTradeoff(const std::vector<WeightedRdpCurve>& curves, double type1);

// f-DP to (eps, delta)-DP, evaluated through the numerically stable
// log-domain form of 1 - f(x) - (-df(x)) x.
double TradeoffDeltaAtEps(const TradeoffFn& f, double eps);
// Smallest eps >= 0 with delta(eps) <= delta; 0 when already satisfied.
double TradeoffEpsAtDelta(const TradeoffFn& f, double delta);

}  // namespace afa

#endif  // AFA_ACCOUNTANT_H_
