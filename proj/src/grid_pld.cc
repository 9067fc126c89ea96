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
#include "afa/grid_pld.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "afa/parallel.h"

namespace afa {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogSumExp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double LogNormalDensity(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return -0.5 * z * z - std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
}

double SubsampledLoss(double sigma, double gamma, MixtureDirection dir,
                      double o) {
  const double z = (2.0 * o - 1.0) / (2.0 * sigma * sigma);
  const double lg = std::log(gamma);
  const double l1mg = std::log1p(-gamma);
  if (dir == MixtureDirection::kRemove) return LogSumExp2(lg + z, l1mg);
  return -LogSumExp2(l1mg, lg - z);
}

GridPld BuildGridImpl(const std::function<double(double)>& log_p,
                      const std::function<double(double)>& log_q,
                      const std::function<std::pair<double, double>(
                          double, double)>& extrema,
                      double log_tail, double S, long N) {
  if (S <= 0 || N < 2) {
    throw std::invalid_argument("BuildGrid: S > 0 and N >= 2 required");
  }
  GridPld grid;
  grid.S = S;
  grid.N = N;
  grid.delta_o = 2.0 * S / static_cast<double>(N);
  grid.log_tail_per_composition = log_tail;
  grid.log_mass_p.resize(N);
  grid.log_mass_q.resize(N);
  grid.loss_lo.resize(N);
  grid.loss_hi.resize(N);
  const double log_delta = std::log(grid.delta_o);
  ParallelFor(static_cast<std::size_t>(N), [&](std::size_t j) {
    const double o = -S + grid.delta_o * static_cast<double>(j);
    grid.log_mass_p[j] = log_p(o) + log_delta;
    grid.log_mass_q[j] = log_q(o) + log_delta;
    const auto [lo, hi] = extrema(o, o + grid.delta_o);
    grid.loss_lo[j] = lo;
    grid.loss_hi[j] = hi;
  });
  grid.mass_p = 0.0;
  grid.mass_q = 0.0;
  for (long j = 0; j < N; ++j) {
    grid.mass_p += std::exp(grid.log_mass_p[j]);
    grid.mass_q += std::exp(grid.log_mass_q[j]);
  }
  return grid;
}

}  // namespace

GridPld BuildGrid(const SubsampledGaussianSpec& spec, double S, long N) {
  if (spec.sigma <= 0 || spec.gamma <= 0 || spec.gamma > 1) {
    throw std::invalid_argument("BuildGrid: sigma > 0 and gamma in (0,1]");
  }
  const double sigma = spec.sigma, gamma = spec.gamma;
  const MixtureDirection dir = spec.direction;
  std::function<double(double)> log_p, log_q;
  if (dir == MixtureDirection::kRemove) {
    log_p = [sigma, gamma](double o) {
      return LogSumExp2(std::log1p(-gamma) + LogNormalDensity(o, 0, sigma),
                        std::log(gamma) + LogNormalDensity(o, 1, sigma));
    };
    log_q = [sigma](double o) { return LogNormalDensity(o, 0, sigma); };
  } else {
    log_p = [sigma](double o) { return LogNormalDensity(o, 1, sigma); };
    log_q = [sigma, gamma](double o) {
      return LogSumExp2(std::log1p(-gamma) + LogNormalDensity(o, 1, sigma),
                        std::log(gamma) + LogNormalDensity(o, 0, sigma));
    };
  }
  // The subsampled-Gaussian loss is strictly increasing in o, so the cell
  // envelope is the pair of endpoint values.
  const auto extrema = [sigma, gamma, dir](double lo, double hi) {
    return std::make_pair(SubsampledLoss(sigma, gamma, dir, lo),
                          SubsampledLoss(sigma, gamma, dir, hi));
  };
  return BuildGridImpl(log_p, log_q, extrema, LogTailBound(sigma, S), S, N);
}

GridPld BuildGrid(const CustomDensitySpec& spec, double S, long N) {
  if (!spec.log_p || !spec.log_q) {
    throw std::invalid_argument("BuildGrid: densities required");
  }
  std::function<std::pair<double, double>(double, double)> extrema;
  if (spec.cell_extrema) {
    extrema = spec.cell_extrema;
  } else if (spec.loss_monotone && spec.loss) {
    const auto loss = spec.loss;
    extrema = [loss](double lo, double hi) {
      const double a = loss(lo), b = loss(hi);
      return std::make_pair(std::min(a, b), std::max(a, b));
    };
  } else {
    throw std::invalid_argument(
        "BuildGrid: non-monotone loss without a monotonicity certificate or "
        "per-cell extremum callables");
  }
  return BuildGridImpl(spec.log_p, spec.log_q, extrema,
                       spec.log_tail_per_composition, S, N);
}

const PhiTerm& GridPld::Term(Side side) const {
  auto& slot = side == Side::kLo ? lo_term_ : hi_term_;
  if (!slot.has_value()) {
    // Direction Q uses L_{Q,P} = -L_{P,Q}; its lower envelope is the negated
    // upper envelope and vice versa.
    std::vector<double> loss_p, loss_q;
    if (side == Side::kLo) {
      loss_p = loss_lo;
      loss_q.resize(loss_hi.size());
      for (std::size_t i = 0; i < loss_hi.size(); ++i) loss_q[i] = -loss_hi[i];
    } else {
      loss_p = loss_hi;
      loss_q.resize(loss_lo.size());
      for (std::size_t i = 0; i < loss_lo.size(); ++i) loss_q[i] = -loss_lo[i];
    }
    std::ostringstream key;
    key.precision(17);
    key << "grid:" << S << ':' << N << ':' << mass_p << ':' << mass_q << ':'
        << (side == Side::kLo ? "lo" : "hi") << ':' << this;
    slot = PhiTerm::FromAtoms(AtomList::Build(std::move(loss_p), log_mass_p),
                              AtomList::Build(std::move(loss_q), log_mass_q),
                              key.str());
  }
  return *slot;
}

std::complex<double> PhiBounds(const GridPld& grid, double t, Direction dir,
                               Side side) {
  return std::exp(grid.Term(side).LogPhi(t, dir));
}

double LogTailBound(double sigma, double S) {
  if (S <= 1) {
    // Degenerate truncation: the bound is vacuous but still well defined.
    return LogSumExp2(-S * S / (2.0 * sigma * sigma), 0.0);
  }
  const double s2 = 2.0 * sigma * sigma;
  return LogSumExp2(-S * S / s2, -(S - 1.0) * (S - 1.0) / s2);
}

double TailBound(double sigma, double gamma, double S, long k) {
  (void)gamma;
  return static_cast<double>(k) * std::exp(LogTailBound(sigma, S));
}

SandwichResult DeltaSandwich(const GridPld& grid, long k, double eps,
                             const QuadConfig& cfg) {
  SandwichResult out;
  if (k < 0) throw std::invalid_argument("DeltaSandwich: k >= 0");
  if (k == 0) return out;  // empty composition: delta == 0 for eps >= 0
  LogPhiLedger lo_ledger, hi_ledger;
  lo_ledger = lo_ledger.Append(grid.Term(Side::kLo), k);
  hi_ledger = hi_ledger.Append(grid.Term(Side::kHi), k);
  const DeltaResult lo = DeltaFromLedger(lo_ledger, eps, cfg);
  const DeltaResult hi = DeltaFromLedger(hi_ledger, eps, cfg);
  // The certified bracket accounts for the truncated tail (k * delta_tail
  // per the union bound), the reported quadrature error, and the roundoff
  // floor of a k-fold composed numeric phi.
  const double tail = static_cast<double>(k) * grid.TailMassBound();
  const double noise = kCompositionNoisePerTerm * static_cast<double>(k);
  out.delta_lo = std::max(0.0, lo.delta - tail - lo.err_estimate - noise);
  out.delta_hi = std::min(1.0, hi.delta + tail + hi.err_estimate + noise);
  out.delta_lo = std::min(out.delta_lo, out.delta_hi);
  out.err_estimate = std::max(lo.err_estimate, hi.err_estimate);
  out.converged = lo.converged && hi.converged;
  return out;
}

}  // namespace afa
