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
#ifndef AFA_DOMINATING_PAIR_H_
#define AFA_DOMINATING_PAIR_H_

#include <functional>
#include <optional>
#include <vector>

#include "afa/divergence.h"
#include "afa/phi.h"

// Construction and transformation of dominating pairs: from privacy-profile
// bounds via the uniform-based construction, under adaptive composition, and
// under Poisson/subset sampling with the add and remove directions kept
// separate.

namespace afa {

enum class Relation { kAdd, kRemove, kReplace, kSymmetric };

enum class SamplingKind { kPoisson, kSubset };

struct SamplingScheme {
  SamplingKind kind = SamplingKind::kPoisson;
  double gamma = 1.0;  // subset sampling: gamma = m/n
};

// A pair of distributions certified to dominate a mechanism's hockey-stick
// curve for all alpha >= 0. Named families stay symbolic; discretization
// happens only at evaluation or composition time.
class DominatingPair {
 public:
  enum class Kind {
    kGaussian,
    kLaplace,
    kRr,
    kSubsampledGaussian,
    kDiscrete,
    kProfileDerived,
  };

  static DominatingPair Gaussian(double sigma, Relation rel = Relation::kSymmetric);
  static DominatingPair Laplace(double lambda, Relation rel = Relation::kSymmetric);
  static DominatingPair Rr(double p, Relation rel = Relation::kSymmetric);
  static DominatingPair SubsampledGaussian(double sigma, double gamma,
                                           MixtureDirection dir, Relation rel);
  static DominatingPair Discrete(DiscretePair pair, Relation rel,
                                 bool tight = false);
  // P given by per-cell masses on a uniform grid of [0,1] plus an atom at 1;
  // Q is Uniform([0,1]).
  static DominatingPair ProfileDerived(std::vector<double> p_cell_mass,
                                       double atom_at_one, Relation rel);

  Kind kind() const { return kind_; }
  Relation relation() const { return relation_; }
  bool tight() const { return tight_; }
  double sigma() const { return sigma_; }
  double lambda() const { return lambda_; }
  double p() const { return p_; }
  double gamma() const { return gamma_; }
  MixtureDirection mixture_direction() const { return mix_dir_; }
  const DiscretePair& discrete() const;
  const std::vector<double>& profile_cells() const { return p_cell_; }
  double atom_at_one() const { return atom_at_one_; }

  // H_alpha(P || Q); closed form for named families, exact sums otherwise.
  double Hs(double alpha) const;

  // The alpha -> Hs(alpha) view.
  PrivacyProfile Profile() const;

  // Coarsening to a DiscretePair with at most `atom_budget` finite atoms.
  DiscretePair ToDiscrete(long atom_budget = 4096) const;

 private:
  DominatingPair() = default;

  Kind kind_ = Kind::kGaussian;
  Relation relation_ = Relation::kSymmetric;
  bool tight_ = false;
  double sigma_ = 0, lambda_ = 0, p_ = 0, gamma_ = 1;
  MixtureDirection mix_dir_ = MixtureDirection::kRemove;
  std::optional<DiscretePair> discrete_;
  std::vector<double> p_cell_;
  double atom_at_one_ = 0;
};

struct PairFromProfileConfig {
  int cells = 4096;
  int conjugate_grid = 4096;
};

// Uniform-based pair whose hockey-stick curve reproduces a valid profile:
// Q = Uniform([0,1]) and P has CDF 1 + H*(x-1) on [0,1) with an atom at 1 of
// size inf H. The profile must satisfy the membership conditions (convex,
// nonincreasing, H(0) = 1, H >= (1-alpha)_+); run HsClosure first for
// arbitrary upper bounds.
DominatingPair PairFromProfile(const PrivacyProfile& h,
                               const PairFromProfileConfig& cfg = {});

// HS(h) = (min{1, running-min h})** -- the greatest valid profile below h,
// computed by running min, clamp, and discrete double conjugation (lower
// convex envelope) on a log-spaced alpha grid.
PrivacyProfile HsClosure(const std::function<double(double)>& h);

// Product pair (P x P', Q x Q') with additive log-losses. Factors that are
// not discrete are coarsened to `factor_budget` atoms first; the product is
// rejected beyond `product_budget` atoms (use the phi ledger instead).
DominatingPair ComposePairs(const DominatingPair& a, const DominatingPair& b,
                            long factor_budget = 1024,
                            long product_budget = (1L << 21));

// Privacy amplification by sampling (add and remove handled separately):
//   add    -> (P, (1-gamma) P + gamma Q)
//   remove -> ((1-gamma) Q + gamma P, Q)
// Poisson sampling requires an add/remove (or symmetric) relation; subset
// sampling requires the replace relation.
DominatingPair Amplify(const DominatingPair& pair, const SamplingScheme& scheme,
                       MixtureDirection direction);

// Two-piece subsampled profile for symmetric relations: the remove-direction
// mixture curve for alpha >= 1 and the add-direction curve for alpha < 1.
double SubsampleProfileSymmetric(const DominatingPair& pair,
                                 const SamplingScheme& scheme, double alpha);

// Extends a pair certified for alpha >= 1 under a symmetric relation to all
// alpha >= 0 by the swap identity, materialized through HsClosure +
// PairFromProfile.
DominatingPair DominateFullRange(const DominatingPair& pair);

}  // namespace afa

#endif  // AFA_DOMINATING_PAIR_H_
