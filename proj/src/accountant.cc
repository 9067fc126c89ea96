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
#include "afa/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "afa/errors.h"
#include "afa/quadrature.h"

namespace afa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogSumExp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

PhiTerm TermFor(const MechanismSpec& spec, MixtureDirection dir) {
  switch (spec.kind) {
    case MechanismKind::kGaussian:
      if (spec.sampling.has_value() && spec.sampling->gamma < 1.0) {
        return PhiTerm::QuadMixture(spec.sigma, spec.sampling->gamma, dir);
      }
      return PhiTerm::Gaussian(spec.sigma);
    case MechanismKind::kLaplace:
      return PhiTerm::Laplace(spec.lambda);
    case MechanismKind::kRandomizedResponse:
      return PhiTerm::Rr(spec.p);
    case MechanismKind::kDiscrete:
      if (!spec.pair.has_value()) {
        throw std::invalid_argument("MechanismSpec: discrete kind needs a pair");
      }
      return PhiTerm::Discrete(*spec.pair);
  }
  throw std::logic_error("MechanismSpec: unknown kind");
}

// Golden-section refinement of a scalar minimum on [lo, hi].
template <typename Fn>
double GoldenMin(const Fn& fn, double lo, double hi, int iters = 80) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 > f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = fn(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = fn(x1);
    }
  }
  return std::min(f1, f2);
}

}  // namespace

void Accountant::Add(const MechanismSpec& spec) {
  if (spec.count < 1) throw std::invalid_argument("MechanismSpec: count >= 1");
  if (spec.sampling.has_value()) {
    if (spec.kind != MechanismKind::kGaussian) {
      throw std::invalid_argument(
          "Accountant: sampling is supported for the Gaussian mechanism");
    }
    const SamplingSpec& s = *spec.sampling;
    if (s.gamma <= 0 || s.gamma > 1) {
      throw std::invalid_argument("SamplingSpec: gamma in (0,1]");
    }
    if (s.kind == SamplingKind::kPoisson && spec.relation == Relation::kReplace) {
      throw std::invalid_argument(
          "Accountant: Poisson sampling requires an add/remove (or symmetric) "
          "relation");
    }
    if (s.kind == SamplingKind::kSubset && spec.relation != Relation::kReplace) {
      throw std::invalid_argument(
          "Accountant: subset sampling requires the replace relation");
    }
    switch (s.policy) {
      case DirectionPolicy::kBoth:
        break;
      case DirectionPolicy::kAdd:
        use_remove_ = false;
        break;
      case DirectionPolicy::kRemove:
        use_add_ = false;
        break;
    }
    if (!use_add_ && !use_remove_) {
      throw std::invalid_argument(
          "Accountant: conflicting direction policies leave no ledger");
    }
    if (use_remove_) {
      remove_ledger_ = remove_ledger_.Append(
          TermFor(spec, MixtureDirection::kRemove), spec.count);
    }
    if (use_add_) {
      add_ledger_ = add_ledger_.Append(TermFor(spec, MixtureDirection::kAdd),
                                       spec.count);
    }
    return;
  }
  const PhiTerm term = TermFor(spec, MixtureDirection::kRemove);
  if (use_remove_) remove_ledger_ = remove_ledger_.Append(term, spec.count);
  if (use_add_) add_ledger_ = add_ledger_.Append(term, spec.count);
}

DeltaResult Accountant::DeltaOfEps(double eps) const {
  DeltaResult best;
  bool first = true;
  if (use_remove_) {
    best = DeltaFromLedger(remove_ledger_, eps, quad_);
    first = false;
  }
  if (use_add_) {
    const DeltaResult add = DeltaFromLedger(add_ledger_, eps, quad_);
    if (first || add.delta > best.delta) {
      const bool conv = first ? add.converged : best.converged && add.converged;
      const double err =
          first ? add.err_estimate : std::max(best.err_estimate, add.err_estimate);
      best = add;
      best.converged = conv;
      best.err_estimate = err;
    }
  }
  return best;
}

double Accountant::InfMassFloor() const {
  double floor = 0.0;
  if (use_remove_) {
    floor = std::max(floor, std::max(remove_ledger_.InfMass(Direction::kP),
                                     remove_ledger_.InfMass(Direction::kQ)));
  }
  if (use_add_) {
    floor = std::max(floor, std::max(add_ledger_.InfMass(Direction::kP),
                                     add_ledger_.InfMass(Direction::kQ)));
  }
  return floor;
}

double Accountant::EpsOfDelta(double delta) const {
  if (delta <= 0 || delta >= 1) {
    throw std::invalid_argument("EpsOfDelta: delta must be in (0,1)");
  }
  if (delta <= InfMassFloor()) {
    std::ostringstream msg;
    msg << "EpsOfDelta: no finite epsilon; delta=" << delta
        << " does not exceed the mass-at-infinity floor " << InfMassFloor();
    throw std::invalid_argument(msg.str());
  }
  if (DeltaOfEps(0.0).delta <= delta) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (DeltaOfEps(hi).delta > delta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) {
      throw NumericalError("EpsOfDelta: bisection bracket not found", hi);
    }
  }
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (DeltaOfEps(mid).delta > delta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RdpCurve RdpCurve::Gaussian(double sigma) {
  if (sigma <= 0) throw std::invalid_argument("RdpCurve: sigma > 0");
  RdpCurve out;
  const double s2 = 2.0 * sigma * sigma;
  out.eps_of_alpha_ = [s2](double alpha) {
    if (alpha <= 0) throw std::domain_error("RdpCurve: alpha > 0");
    return alpha / s2;
  };
  return out;
}

RdpCurve RdpCurve::Discrete(DiscretePair pair) {
  pair.Validate();
  RdpCurve out;
  out.eps_of_alpha_ = [pair = std::move(pair)](double alpha) {
    if (alpha <= 0) throw std::domain_error("RdpCurve: alpha > 0");
    if (pair.PInfMass() > 0 && alpha >= 1) return kInf;
    if (alpha == 1.0) {
      double kl = 0.0;
      for (std::size_t i = 0; i < pair.size(); ++i) {
        kl += std::exp(pair.logp[i]) * pair.Loss(i);
      }
      return kl;
    }
    double log_sum = kNegInf;
    for (std::size_t i = 0; i < pair.size(); ++i) {
      log_sum = LogSumExp2(log_sum,
                           alpha * pair.logp[i] + (1.0 - alpha) * pair.logq[i]);
    }
    return log_sum / (alpha - 1.0);
  };
  return out;
}

RdpCurve RdpCurve::Numeric(std::function<double(double)> log_p,
                           std::function<double(double)> log_q) {
  RdpCurve out;
  out.eps_of_alpha_ = [log_p = std::move(log_p),
                       log_q = std::move(log_q)](double alpha) {
    if (alpha <= 0) throw std::domain_error("RdpCurve: alpha > 0");
    QuadConfig cfg;
    cfg.abs_tol = 1e-13;
    if (alpha == 1.0) {
      const auto integrand = [&](double o) {
        const double lp = log_p(o);
        return std::exp(lp) * (lp - log_q(o));
      };
      return Integrate(MapInfinite(integrand), -1.0, 1.0, cfg).value;
    }
    const auto integrand = [&](double o) {
      return std::exp(alpha * log_p(o) + (1.0 - alpha) * log_q(o));
    };
    const double moment =
        Integrate(MapInfinite(integrand), -1.0, 1.0, cfg).value;
    return std::log(std::max(moment, 1e-300)) / (alpha - 1.0);
  };
  return out;
}

RdpCurve RdpCurve::SubsampledGaussian(double sigma, double gamma,
                                      MixtureDirection dir) {
  if (sigma <= 0 || gamma <= 0 || gamma > 1) {
    throw std::invalid_argument("RdpCurve: sigma > 0, gamma in (0,1]");
  }
  const double s = sigma;
  const auto log_n0 = [s](double o) {
    const double z = o / s;
    return -0.5 * z * z - std::log(s * std::sqrt(2.0 * std::numbers::pi));
  };
  const auto log_n1 = [s](double o) {
    const double z = (o - 1.0) / s;
    return -0.5 * z * z - std::log(s * std::sqrt(2.0 * std::numbers::pi));
  };
  const double lg = std::log(gamma), l1mg = std::log1p(-gamma);
  if (dir == MixtureDirection::kRemove) {
    return Numeric(
        [=](double o) { return LogSumExp2(l1mg + log_n0(o), lg + log_n1(o)); },
        log_n0);
  }
  return Numeric(log_n1, [=](double o) {
    return LogSumExp2(l1mg + log_n1(o), lg + log_n0(o));
  });
}

double RdpCurve::EpsOfAlpha(double alpha) const { return eps_of_alpha_(alpha); }

double RdpComposeConvertClassical(const std::vector<WeightedRdpCurve>& curves,
                                  double delta) {
  if (delta <= 0 || delta >= 1) {
    throw std::invalid_argument("RdpComposeConvertClassical: delta in (0,1)");
  }
  const double log_inv_delta = std::log(1.0 / delta);
  const auto objective = [&](double alpha) {
    double eps = 0.0;
    for (const WeightedRdpCurve& w : curves) {
      eps += static_cast<double>(w.count) * w.curve.EpsOfAlpha(alpha);
    }
    return eps + log_inv_delta / (alpha - 1.0);
  };
  const int kGrid = 128;
  std::vector<double> alphas(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    alphas[i] = std::exp(std::log(1.0001) +
                         (std::log(1e6) - std::log(1.0001)) * i / (kGrid - 1));
  }
  double best = kInf;
  int best_i = 0;
  for (int i = 0; i < kGrid; ++i) {
    const double v = objective(alphas[i]);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  const double lo = alphas[std::max(0, best_i - 1)];
  const double hi = alphas[std::min(kGrid - 1, best_i + 1)];
  return std::min(best, GoldenMin(objective, lo, hi));
}

namespace {

// Grid of Renyi orders for the trade-off conversion: {0.5 + j/64}_{j<32},
// the KL point, and a log-spaced tail over (1, 1e6].
std::vector<double> RdpAlphaGrid() {
  std::vector<double> alphas;
  for (int j = 0; j < 32; ++j) alphas.push_back(0.5 + j / 64.0);
  alphas.push_back(1.0);
  const int kTail = 128;
  for (int i = 0; i < kTail; ++i) {
    alphas.push_back(std::exp(std::log(1.001) +
                              (std::log(1e6) - std::log(1.001)) * i /
                                  (kTail - 1)));
  }
  return alphas;
}

// log of x^a (1-y)^{1-a} + (1-x)^a y^{1-a} (the alpha > 1 / alpha < 1 moment
// constraint), -inf-safe at the boundary.
double LogMoment(double a, double x, double y) {
  const double t1 =
      (x > 0 ? a * std::log(x) : (a > 0 ? kNegInf : kInf)) +
      (1.0 - y > 0 ? (1.0 - a) * std::log1p(-y) : (1.0 - a > 0 ? kNegInf : kInf));
  const double t2 =
      (1.0 - x > 0 ? a * std::log1p(-x) : (a > 0 ? kNegInf : kInf)) +
      (y > 0 ? (1.0 - a) * std::log(y) : (1.0 - a > 0 ? kNegInf : kInf));
  return LogSumExp2(t1, t2);
}

double KlConstraint(double x, double y) {
  // x log(x/(1-y)) + (1-x) log((1-x)/y) with 0 log 0 = 0.
  double acc = 0.0;
  if (x > 0) acc += x * (std::log(x) - std::log1p(-y));
  if (x < 1) acc += (1.0 - x) * (std::log1p(-x) - std::log(y));
  return acc;
}

// Minimal feasible type II error for one constraint fn(y) <=> bound, where
// fn is first decreasing (alpha >= 1 case) or first increasing (alpha < 1,
// reversed inequality) in y. Returns nullopt when infeasible.
std::optional<double> MinFeasibleY(const std::function<double(double)>& fn,
                                   double bound, bool reversed) {
  const double y_eps = 1e-15;
  // Locate the inner extremum by ternary search; fn is unimodal on (0,1).
  double lo = y_eps, hi = 1.0 - y_eps;
  for (int i = 0; i < 200; ++i) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    const bool keep_right = reversed ? fn(m1) < fn(m2) : fn(m1) > fn(m2);
    if (keep_right) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  const double y_star = 0.5 * (lo + hi);
  const double extremum = fn(y_star);
  const auto feasible = [&](double v) {
    return reversed ? v >= bound : v <= bound;
  };
  if (!feasible(extremum)) return std::nullopt;
  if (feasible(fn(y_eps))) return 0.0;
  // Bisect the monotone branch on [y_eps, y_star].
  double a = y_eps, b = y_star;
  for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
    const double mid = 0.5 * (a + b);
    (feasible(fn(mid)) ? b : a) = mid;
  }
  return b;
}

// Minimal type II error at type I error x implied by (alpha, eps)-RDP.
std::optional<double> RdpPointwiseY(double alpha, double eps, double x) {
  if (eps == kInf) return 0.0;
  if (alpha == 1.0) {
    const auto c1 = [x](double y) { return KlConstraint(x, y); };
    const auto c2 = [x](double y) { return KlConstraint(y, x); };
    const auto y1 = MinFeasibleY(c1, eps, /*reversed=*/false);
    const auto y2 = MinFeasibleY(c2, eps, /*reversed=*/false);
    if (!y1 || !y2) return std::nullopt;
    return std::max(*y1, *y2);
  }
  const bool reversed = alpha < 1.0;
  const double bound = (alpha - 1.0) * eps;
  const auto c1 = [alpha, x](double y) { return LogMoment(alpha, x, y); };
  const auto c2 = [alpha, x](double y) { return LogMoment(alpha, y, x); };
  const auto y1 = MinFeasibleY(c1, bound, reversed);
  const auto y2 = MinFeasibleY(c2, bound, reversed);
  if (!y1 || !y2) return std::nullopt;
  return std::max(*y1, *y2);
}

}  // namespace

TradeoffFn RdpToTradeoff(const std::vector<WeightedRdpCurve>& curves) {
  const std::vector<double> alphas = RdpAlphaGrid();
  std::vector<double> eps_values;
  eps_values.reserve(alphas.size());
  for (double a : alphas) {
    double eps = 0.0;
    for (const WeightedRdpCurve& w : curves) {
      eps += static_cast<double>(w.count) * w.curve.EpsOfAlpha(a);
    }
    eps_values.push_back(eps);
  }

  const int kX = 257;
  std::vector<double> xs(kX), ys(kX);
  for (int i = 0; i < kX; ++i) {
    const double x = static_cast<double>(i) / (kX - 1);
    double best = 0.0;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      const auto y = RdpPointwiseY(alphas[j], eps_values[j], x);
      if (y.has_value()) best = std::max(best, *y);
    }
    xs[i] = x;
    ys[i] = std::min(best, 1.0 - x);
  }
  ys[0] = std::max(ys[0], ys[1]);  // left endpoint continuity
  // Lower convex envelope over the x grid.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) -
                           (xs[i] - xs[a]) * (ys[b] - ys[a]);
      if (cross <= 0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  std::vector<double> hx, hy;
  for (std::size_t i : hull) {
    hx.push_back(xs[i]);
    hy.push_back(ys[i]);
  }
  TradeoffFn out;
  out.f = [hx, hy](double x) {
    if (x <= hx.front()) return hy.front();
    if (x >= hx.back()) return hy.back();
    const auto it = std::upper_bound(hx.begin(), hx.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - hx.begin());
    const double frac = (x - hx[j - 1]) / (hx[j] - hx[j - 1]);
    return hy[j - 1] + frac * (hy[j] - hy[j - 1]);
  };
  out.subgradient = [hx, hy](double x) {
    std::size_t j = 1;
    while (j + 1 < hx.size() && hx[j] < x) ++j;
    return (hy[j] - hy[j - 1]) / (hx[j] - hx[j - 1]);
  };
  return out;
}

double RdpToTradeoff(const std::vector<WeightedRdpCurve>& curves, double type1) {
  return RdpToTradeoff(curves).f(type1);
}

double TradeoffDeltaAtEps(const TradeoffFn& f, double eps) {
  // delta(eps) = 1 + f*(-e^eps) evaluated at the tangency point, combined in
  // the stable form e^b expm1(a - b) for the difference of exponentials.
  const ConjugateValue conj = ProfileFromTradeoff(f, eps);
  return conj.value;
}

double TradeoffEpsAtDelta(const TradeoffFn& f, double delta) {
  if (delta <= 0 || delta >= 1) {
    throw std::invalid_argument("TradeoffEpsAtDelta: delta in (0,1)");
  }
  if (TradeoffDeltaAtEps(f, 0.0) <= delta) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (TradeoffDeltaAtEps(f, hi) > delta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) {
      throw NumericalError("TradeoffEpsAtDelta: bracket not found", hi);
    }
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (TradeoffDeltaAtEps(f, mid) > delta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace afa
