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
#include "afa/levy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace afa {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// u-coordinate of a given t under the map t = u / (1 - u^2), u in (0, 1).
double UOfT(double t) {
  if (t <= 0) return 0.0;
  return (-1.0 + std::sqrt(1.0 + 4.0 * t * t)) / (2.0 * t);
}

double Clamp(double x, double lo, double hi) {
  return std::min(hi, std::max(lo, x));
}

}  // namespace

LevyResult LevyCdf(const LogPhiLedger& ledger, Direction dir, double x,
                   const QuadConfig& cfg) {
  const double log_mass = ledger.LogFiniteMass(dir);
  if (log_mass == kNegInf) return {0.0, 0.0, true};
  const double mass = std::exp(log_mass);

  // Numerically-summed phi terms carry roundoff that the composition
  // multiplies by k; a certified tolerance below that floor is unattainable
  // and would spiral the panel refinement into pure noise.
  QuadConfig eff = cfg;
  eff.abs_tol =
      std::max(cfg.abs_tol, kCompositionNoisePerTerm * ledger.NoiseMultiplier());

  const auto folded = [&ledger, dir, x, log_mass](double t) {
    const std::complex<double> log_phi =
        ledger.Eval(t, dir) - log_mass -
        std::complex<double>(0.0, t * x);
    const double value = std::exp(log_phi.real()) * std::sin(log_phi.imag());
    const double out = value / t;
    if (std::isnan(out)) {
      throw std::runtime_error("LevyCdf: NaN integrand (phase corruption)");
    }
    return out;
  };

  // Panel seeds: the zeros of e^{-itx} land every pi/|x| in t; a geometric
  // ladder covers the decay of |phi| when x is small. Every seed is snapped
  // to the dyadic lattice u = j/1024, so panel edges (and hence the
  // Gauss-Legendre nodes, and hence the per-term phi cache keys) coincide
  // across queries with different x and multiplicities.
  std::vector<double> breaks;
  for (double u : {0.05, 0.15, 0.3, 0.5, 0.7, 0.85, 0.95, 0.99, 0.999}) {
    breaks.push_back(std::ceil(u * 1024.0) / 1024.0);
  }
  const double ax = std::abs(x);
  if (ax > 1e-12) {
    const double spacing = std::numbers::pi / ax;
    for (int k = 1; k <= 32; ++k) {
      const double u = UOfT(spacing * k);
      if (u >= 0.999) break;
      breaks.push_back(std::ceil(u * 1024.0) / 1024.0);
    }
  }

  const QuadResult integral =
      Integrate(MapInfinite(folded), 0.0, 1.0, eff, breaks);
  const double f_norm = 0.5 - integral.value / std::numbers::pi;
  LevyResult out;
  out.value = mass * Clamp(f_norm, 0.0, 1.0);
  out.err_estimate = mass * integral.err_estimate / std::numbers::pi;
  out.converged = integral.converged;
  return out;
}

namespace {

DeltaResult DeltaByStairs(
    const std::vector<std::pair<double, double>>& atoms_p,
    const std::vector<std::pair<double, double>>& atoms_q, double p_inf,
    double q_inf, double eps, bool clamp_paren) {
  const double rate = std::exp(eps);
  double tail_p = 0.0;
  for (const auto& [loss, m] : atoms_p) {
    if (loss > eps) tail_p += m;
  }
  double low_q = 0.0;
  for (const auto& [loss, m] : atoms_q) {
    if (loss < -eps) low_q += m;
  }
  double paren_p = tail_p - rate * low_q;
  double tail_q = 0.0;
  for (const auto& [loss, m] : atoms_q) {
    if (loss > eps) tail_q += m;
  }
  double low_p = 0.0;
  for (const auto& [loss, m] : atoms_p) {
    if (loss < -eps) low_p += m;
  }
  double paren_q = tail_q - rate * low_p;
  if (clamp_paren) {
    paren_p = std::max(0.0, paren_p);
    paren_q = std::max(0.0, paren_q);
  }
  DeltaResult out;
  out.delta = Clamp(std::max(p_inf + paren_p, q_inf + paren_q), 0.0, 1.0);
  return out;
}

}  // namespace

DeltaResult DeltaFromLedger(const LogPhiLedger& ledger, double eps,
                            const QuadConfig& cfg, std::size_t stairs_cap) {
  DeltaResult out;
  if (ledger.Empty()) {
    out.delta = std::max(0.0, -std::expm1(eps));  // (1 - e^eps)_+
    return out;
  }
  const double p_inf = ledger.InfMass(Direction::kP);
  const double q_inf = ledger.InfMass(Direction::kQ);

  const auto atoms_p = ledger.ComposedAtoms(Direction::kP, stairs_cap);
  if (atoms_p.has_value()) {
    const auto atoms_q = ledger.ComposedAtoms(Direction::kQ, stairs_cap);
    if (atoms_q.has_value()) {
      return DeltaByStairs(*atoms_p, *atoms_q, p_inf, q_inf, eps,
                           ledger.TruePair());
    }
  }

  const double rate = std::exp(eps);
  const LevyResult f_p = LevyCdf(ledger, Direction::kP, eps, cfg);
  const LevyResult g_q = LevyCdf(ledger, Direction::kQ, -eps, cfg);
  const LevyResult f_q = LevyCdf(ledger, Direction::kQ, eps, cfg);
  const LevyResult g_p = LevyCdf(ledger, Direction::kP, -eps, cfg);

  double paren_p = (1.0 - p_inf - f_p.value) - rate * g_q.value;
  double paren_q = (1.0 - q_inf - f_q.value) - rate * g_p.value;
  if (ledger.TruePair()) {
    paren_p = std::max(0.0, paren_p);
    paren_q = std::max(0.0, paren_q);
  }
  out.delta = Clamp(std::max(p_inf + paren_p, q_inf + paren_q), 0.0, 1.0);
  out.err_estimate =
      std::max(f_p.err_estimate + rate * g_q.err_estimate,
               f_q.err_estimate + rate * g_p.err_estimate);
  out.converged =
      f_p.converged && g_q.converged && f_q.converged && g_p.converged;
  return out;
}

}  // namespace afa
