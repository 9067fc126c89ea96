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
#ifndef AFA_PHI_H_
#define AFA_PHI_H_

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "afa/divergence.h"

// Characteristic functions of privacy-loss distributions and the symbolic
// log-phi ledger they compose into.
//
// Direction kP is the loss L_{P,Q} = log(dP/dQ) sampled under P; direction
// kQ is L_{Q,P} = log(dQ/dP) sampled under Q. Each term evaluates
// log phi(t) for either direction on the principal branch. Ledger
// multiplicities are integers, so exp(multiplicity * log phi) is exact
// regardless of the branch chosen per point; no phase unwinding is needed
// to recover the composed phi itself.

namespace afa {

enum class Direction { kP, kQ };

enum class MixtureDirection { kAdd, kRemove };

// One (loss, log-mass) list: a finite measure on loss space.
struct AtomList {
  std::vector<double> loss;
  std::vector<double> log_mass;
  double anchor = 0.0;                 // max log_mass
  std::vector<double> weight;          // exp(log_mass - anchor)
  double log_total_mass = 0.0;

  static AtomList Build(std::vector<double> loss, std::vector<double> log_mass);
};

struct QuadMixtureConfig {
  int node_budget = 700;  // total frozen quadrature nodes per phi evaluation
  double mass_tol = 1e-11;
};

class PhiTerm {
 public:
  static PhiTerm Gaussian(double sigma);
  static PhiTerm Laplace(double lambda);
  static PhiTerm Rr(double p);
  static PhiTerm Discrete(const DiscretePair& pair);
  // Subsampled-Gaussian mixture pair evaluated by frozen Gauss-Legendre
  // nodes (the node layout is built once and reused across t).
  static PhiTerm QuadMixture(double sigma, double gamma, MixtureDirection dir,
                             const QuadMixtureConfig& cfg = QuadMixtureConfig());
  // Arbitrary per-direction loss measures (used by the grid approximation;
  // masses may sum below 1, the defect behaves as loss = +inf).
  static PhiTerm FromAtoms(AtomList p_atoms, AtomList q_atoms,
                           std::string key);

  std::complex<double> LogPhi(double t, Direction dir) const;
  // log(1 - Pr[L = inf]) for the direction, i.e. the log of the finite mass.
  double LogFiniteMass(Direction dir) const;
  double InfMass(Direction dir) const;

  // Finite (loss, mass) atoms when the term is a discrete measure.
  bool IsFiniteDiscrete() const;
  // True for one-sided grid approximations, whose two directions do not
  // describe a common pair of measures.
  bool IsGridSide() const;
  bool IsQuadMixture() const;
  std::size_t AtomCount() const;
  std::vector<std::pair<double, double>> Atoms(Direction dir) const;

  const std::string& CanonicalKey() const;

 private:
  struct Impl;
  explicit PhiTerm(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Immutable multiset of phi terms; composition appends terms and evaluation
// sums multiplicity * log phi_term(t).
class LogPhiLedger {
 public:
  LogPhiLedger() = default;

  // Pure: returns a new ledger with `count` copies of the term folded in
  // (merged with an existing entry when the canonical keys match).
  LogPhiLedger Append(const PhiTerm& term, long count = 1) const;

  std::complex<double> Eval(double t, Direction dir) const;
  double LogFiniteMass(Direction dir) const;
  double InfMass(Direction dir) const;

  // Total multiplicity of numerically-summed terms (atom lists, quadrature
  // mixtures). Their roundoff is amplified by the multiplicity, which puts a
  // floor on the tolerance any downstream quadrature can certify.
  double NoiseMultiplier() const;

  bool Empty() const { return entries_.empty(); }
  long TotalCount() const;
  // True when no term is a grid-side approximation, i.e. the two directions
  // describe one common pair of measures.
  bool TruePair() const { return !has_grid_terms_; }

  // Exact convolution of the composed finite loss measure, when every term
  // is discrete and the atom count stays within `cap`. Atoms are coalesced
  // at relative tolerance 1e-12 after each convolution step.
  std::optional<std::vector<std::pair<double, double>>> ComposedAtoms(
      Direction dir, std::size_t cap) const;

  struct Entry {
    PhiTerm term;
    long multiplicity;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  bool has_grid_terms_ = false;
};

// Total Pr[L = inf] of a composition: 1 - prod(1 - pr_i), accumulated in the
// log domain. Throws if any pr_i = 1 (degenerate mechanism).
double InfMassCombine(const std::vector<double>& pr_inf);

}  // namespace afa

#endif  // AFA_PHI_H_
