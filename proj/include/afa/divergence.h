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
#ifndef AFA_DIVERGENCE_H_
#define AFA_DIVERGENCE_H_

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "afa/quadrature.h"

// Discrete distribution pairs, hockey-stick and Renyi divergences, privacy
// loss CDFs, trade-off functions, and the pairwise conversion rules between
// them.
//
// Sign convention used throughout: the privacy loss is L = log(dP/dQ).
// F is the CDF of the finite part of L under P, G is the CDF of the finite
// part of L under Q. Probability mass with L = +inf (P-mass where Q vanishes)
// is carried in p_inf, mass with L = -inf (Q-mass where P vanishes) in q_inf.

namespace afa {

// A pair of distributions over a shared finite outcome set. Atoms where one
// side has zero mass are folded into the logp_inf / logq_inf fields at
// construction, so every stored atom has a finite log-ratio.
struct DiscretePair {
  std::vector<std::string> outcomes;
  std::vector<double> logp;
  std::vector<double> logq;
  double logp_inf;  // log P-mass on {q = 0}; -inf when absent
  double logq_inf;  // log Q-mass on {p = 0}; -inf when absent

  // Builds a pair from plain masses. Lengths must match; masses must be
  // nonnegative and each side must sum to 1 within 1e-12.
  static DiscretePair FromMasses(std::vector<std::string> labels,
                                 const std::vector<double>& p,
                                 const std::vector<double>& q);

  DiscretePair Swapped() const;

  std::size_t size() const { return logp.size(); }
  double Loss(std::size_t i) const { return logp[i] - logq[i]; }
  double PInfMass() const;
  double QInfMass() const;
  void Validate() const;
};

// H_alpha(P || Q) = sum_o (p(o) - alpha q(o))_+ plus the mass at L = +inf.
double HockeyStick(const DiscretePair& pair, double alpha);

// H_alpha(Q || P) computed through the swap identity
// alpha * H_{1/alpha}(P || Q) - alpha + 1. Requires alpha > 0.
double HsSwap(const DiscretePair& pair, double alpha);

enum class Provenance { kExact, kUpperBound, kLowerBound };

// alpha -> delta view of a privacy guarantee; alpha = e^eps. Valid profiles
// are convex, nonincreasing, equal 1 at alpha = 0 and sit above (1-alpha)_+.
struct PrivacyProfile {
  std::function<double(double)> delta_of_alpha;
  Provenance provenance = Provenance::kExact;

  double operator()(double alpha) const { return delta_of_alpha(alpha); }
};

// Trade-off function f: type I error -> minimal type II error.
struct TradeoffFn {
  std::function<double(double)> f;
  // Optional; symmetric finite differences are used when absent.
  std::function<double(double)> subgradient;

  double operator()(double x) const { return f(x); }
};

// CDFs of the finite part of the privacy loss under P (F) and Q (G); see the
// convention note at the top of this header.
struct LossCdfPair {
  std::function<double(double)> F;
  std::function<double(double)> G;
  double p_inf = 0.0;
  double q_inf = 0.0;
};

struct CdfGridConfig {
  double x_min = -30.0;
  double x_max = 30.0;
  int points = 6001;
};

// Differentiates the profile alpha -> H_alpha(Q || P) into the loss CDF pair.
// The profile must be convex in alpha; violations are reported with the
// offending eps. Sampled CDFs are monotonized by running max.
LossCdfPair CdfsFromProfile(const PrivacyProfile& qp_profile,
                            const CdfGridConfig& cfg = CdfGridConfig());

enum class Orientation { kPQ, kQP };

// Hockey-stick divergence recovered from the loss CDFs:
//   H_alpha(P||Q) = 1 - F(log a) - a (1 - q_inf - G(log a))
//   H_alpha(Q||P) = q_inf + G(-log a) - a F(-log a)
// (the mirror image of the log(dQ/dP) formulation). alpha = 0 returns 1.
double ProfileFromCdfs(const LossCdfPair& cdfs, double alpha,
                       Orientation orientation = Orientation::kPQ);

// Trade-off function from the loss CDFs via the likelihood-ratio test curve
// {(p_inf + F(t), 1 - q_inf - G(t))}; flats and atoms are linearly interpolated
// (randomized tests).
double TradeoffFromCdfs(const LossCdfPair& cdfs, double type1);

struct ConjugateValue {
  double value = 0.0;
  double err_bound = 0.0;
};

struct ConjugateConfig {
  int grid_points = 2048;
};

// H_{e^eps}(Q || P) = 1 + f*(-e^eps) with the Fenchel conjugate taken over a
// [0,1] grid plus one Newton refinement around the best grid point.
ConjugateValue ProfileFromTradeoff(const TradeoffFn& f, double eps,
                                   const ConjugateConfig& cfg = ConjugateConfig());

// f(x) = sup_{eps >= 0} max{0, 1 - d(eps) - e^eps x, e^-eps (1 - d(eps) - x)}
// evaluated over {0} and a log-spaced eps grid with local refinement.
double TradeoffFromProfile(const PrivacyProfile& pq_profile, double type1);

struct PhiPair {
  std::complex<double> phi;
  std::complex<double> phi_prime;
};

// Characteristic functions of the loss determined by a trade-off function:
// phi(t) = int_0^1 e^{-it log|f'(x)|} dx and
// phi'(t) = int_0^1 e^{+it log|f'(x)|} |f'(x)| dx.
PhiPair PhiFromTradeoff(const TradeoffFn& f, double t,
                        const QuadConfig& cfg = QuadConfig());

// G from F through the exponential tilt dG = e^{-t} dF. Exact on atoms.
double GFromF(const DiscretePair& pair, double x);
// Numerical Stieltjes version on a callable CDF; integrates over [t_lo, x].
double GFromF(const std::function<double(double)>& F, double x,
              double t_lo = -40.0, int steps = 100000);

struct RenyiResult {
  double value = 0.0;
  double err_estimate = 0.0;
  bool diverged = false;
};

// Renyi divergence of order alpha > 1 from the two hockey-stick curves:
// D_alpha = 1/(alpha-1) log(1 + alpha(alpha+1) *
//   int_0^inf e^{alpha e} H_{e^e}(P||Q) + e^{-(alpha+1)e} H_{e^e}(Q||P) de).
RenyiResult RenyiFromProfile(const PrivacyProfile& pq_profile,
                             const PrivacyProfile& qp_profile, double alpha,
                             const QuadConfig& cfg = QuadConfig());

// Standard normal CDF / quantile used by the closed-form families.
double NormalCdf(double x);
double NormalQuantile(double p);

// Closed-form families (sensitivity-1 mechanisms). k-fold composition of the
// Gaussian mechanism has mu = sqrt(k)/sigma.
double AnalyticGaussianDelta(double mu, double eps);
double AnalyticGaussianEps(double mu, double delta);
PrivacyProfile GaussianProfile(double sigma, int k = 1);
PrivacyProfile RrProfile(double p);
TradeoffFn GaussianTradeoff(double sigma, int k = 1);
TradeoffFn RrTradeoff(double p);
DiscretePair RrPair(double p);

}  // namespace afa

#endif  // AFA_DIVERGENCE_H_
