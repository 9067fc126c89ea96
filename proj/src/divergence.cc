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
#include "afa/divergence.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "boost/math/distributions/normal.hpp"
#include "afa/errors.h"

namespace afa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double Clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Symmetric-difference derivative with step h = max(1e-6, 1e-4 |x|).
double SymmetricDerivative(const std::function<double(double)>& f, double x) {
  const double h = std::max(1e-6, 1e-4 * std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Piecewise-linear interpolant over a uniform grid, constant beyond the ends.
struct UniformGridFn {
  double x_min, dx;
  std::vector<double> values;

  double operator()(double x) const {
    if (x <= x_min) return values.front();
    const double pos = (x - x_min) / dx;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
  }
};

}  // namespace

DiscretePair DiscretePair::FromMasses(std::vector<std::string> labels,
                                      const std::vector<double>& p,
                                      const std::vector<double>& q) {
  if (labels.size() != p.size() || p.size() != q.size()) {
    throw std::invalid_argument("DiscretePair: mass lists must share a length");
  }
  DiscretePair pair;
  pair.logp_inf = kNegInf;
  pair.logq_inf = kNegInf;
  double p_inf = 0.0, q_inf = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0 || q[i] < 0) {
      throw std::invalid_argument("DiscretePair: negative mass");
    }
    if (p[i] == 0 && q[i] == 0) continue;
    if (q[i] == 0) {
      p_inf += p[i];
      continue;
    }
    if (p[i] == 0) {
      q_inf += q[i];
      continue;
    }
    pair.outcomes.push_back(std::move(labels[i]));
    pair.logp.push_back(std::log(p[i]));
    pair.logq.push_back(std::log(q[i]));
  }
  if (p_inf > 0) pair.logp_inf = std::log(p_inf);
  if (q_inf > 0) pair.logq_inf = std::log(q_inf);
  pair.Validate();
  return pair;
}

DiscretePair DiscretePair::Swapped() const {
  DiscretePair out = *this;
  std::swap(out.logp, out.logq);
  std::swap(out.logp_inf, out.logq_inf);
  return out;
}

double DiscretePair::PInfMass() const { return std::exp(logp_inf); }
double DiscretePair::QInfMass() const { return std::exp(logq_inf); }

void DiscretePair::Validate() const {
  if (logp.size() != logq.size() || logp.size() != outcomes.size()) {
    throw std::invalid_argument("DiscretePair: inconsistent lengths");
  }
  double p_total = PInfMass(), q_total = QInfMass();
  for (std::size_t i = 0; i < logp.size(); ++i) {
    p_total += std::exp(logp[i]);
    q_total += std::exp(logq[i]);
  }
  if (std::abs(p_total - 1.0) > 1e-12 || std::abs(q_total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "DiscretePair: masses must sum to 1 (got P=" << p_total
        << ", Q=" << q_total << ")";
    throw std::invalid_argument(msg.str());
  }
}

double HockeyStick(const DiscretePair& pair, double alpha) {
  if (alpha < 0) throw std::domain_error("HockeyStick: alpha must be >= 0");
  double acc = pair.PInfMass();
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const double diff = std::exp(pair.logp[i]) - alpha * std::exp(pair.logq[i]);
    if (diff > 0) acc += diff;
  }
  return acc;
}

double HsSwap(const DiscretePair& pair, double alpha) {
  if (alpha <= 0) {
    throw std::domain_error("HsSwap: the swap identity needs alpha > 0");
  }
  return alpha * HockeyStick(pair, 1.0 / alpha) - alpha + 1.0;
}

LossCdfPair CdfsFromProfile(const PrivacyProfile& qp_profile,
                            const CdfGridConfig& cfg) {
  const auto& h = qp_profile.delta_of_alpha;

  // Convexity precheck in alpha on a log-spaced grid; a violated midpoint
  // chord identifies the offending eps.
  {
    const int kCheck = 160;
    for (int i = 0; i + 2 < kCheck; ++i) {
      const double e0 = cfg.x_min + (cfg.x_max - cfg.x_min) * i / (kCheck - 1);
      const double e2 =
          cfg.x_min + (cfg.x_max - cfg.x_min) * (i + 2) / (kCheck - 1);
      const double a0 = std::exp(e0), a2 = std::exp(e2);
      const double mid = 0.5 * (a0 + a2);
      const double chord = 0.5 * (std::max(0.0, h(a0)) + std::max(0.0, h(a2)));
      if (std::max(0.0, h(mid)) > chord + 1e-9) {
        std::ostringstream msg;
        msg << "CdfsFromProfile: profile is not convex near eps="
            << std::log(mid);
        throw std::invalid_argument(msg.str());
      }
    }
  }

  // h as a function of x = log(alpha), plus its symmetric-difference slope.
  const auto hx = [&h](double x) { return std::max(0.0, h(std::exp(x))); };
  const double q_inf = hx(cfg.x_max);

  const int n = cfg.points;
  const double dx = (cfg.x_max - cfg.x_min) / (n - 1);
  std::vector<double> f_values(n), g_values(n);
  for (int i = 0; i < n; ++i) {
    const double x = cfg.x_min + i * dx;
    const double slope = SymmetricDerivative(hx, -x);
    f_values[i] = Clamp01(-std::exp(x) * slope);
    g_values[i] = Clamp01(hx(-x) - slope - q_inf);
  }
  // Small non-monotone ripples from differentiation must not reach the
  // downstream inversion: running max.
  for (int i = 1; i < n; ++i) {
    f_values[i] = std::max(f_values[i], f_values[i - 1]);
    g_values[i] = std::max(g_values[i], g_values[i - 1]);
  }
  const double p_inf = std::max(0.0, 1.0 - f_values.back());

  LossCdfPair out;
  out.p_inf = p_inf;
  out.q_inf = q_inf;
  out.F = UniformGridFn{cfg.x_min, dx, std::move(f_values)};
  out.G = UniformGridFn{cfg.x_min, dx, std::move(g_values)};
  return out;
}

double ProfileFromCdfs(const LossCdfPair& cdfs, double alpha,
                       Orientation orientation) {
  if (alpha < 0) throw std::domain_error("ProfileFromCdfs: alpha must be >= 0");
  if (alpha == 0) return 1.0;
  const double la = std::log(alpha);
  if (orientation == Orientation::kPQ) {
    const double v =
        1.0 - cdfs.F(la) - alpha * (1.0 - cdfs.q_inf - cdfs.G(la));
    return Clamp01(v);
  }
  const double v =
      cdfs.q_inf + cdfs.G(-la) - alpha * cdfs.F(-la);
  return Clamp01(v);
}

double TradeoffFromCdfs(const LossCdfPair& cdfs, double type1) {
  if (type1 < 0 || type1 > 1) {
    throw std::domain_error("TradeoffFromCdfs: type I error must be in [0,1]");
  }
  // Vertices of the likelihood-ratio test curve, swept over the threshold
  // grid; flats in F with moving G (atoms) are covered by the parametric
  // interpolation between consecutive vertices.
  const int kSamples = 6001;
  const double lo = -40.0, hi = 40.0;
  std::vector<double> xs, ys;
  xs.reserve(kSamples + 2);
  ys.reserve(kSamples + 2);
  xs.push_back(0.0);
  ys.push_back(1.0 - cdfs.q_inf);
  if (cdfs.p_inf > 0) {
    xs.push_back(cdfs.p_inf);
    ys.push_back(1.0 - cdfs.q_inf);
  }
  for (int i = 0; i < kSamples; ++i) {
    const double t = lo + (hi - lo) * i / (kSamples - 1);
    const double x = Clamp01(cdfs.p_inf + cdfs.F(t));
    const double y = Clamp01(1.0 - cdfs.q_inf - cdfs.G(t));
    if (x < xs.back()) continue;
    xs.push_back(x);
    ys.push_back(std::min(y, ys.back()));
  }
  xs.push_back(1.0);
  ys.push_back(0.0);

  if (type1 >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), type1);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  if (j == 0) return ys.front();
  const double x0 = xs[j - 1], x1 = xs[j];
  const double y0 = ys[j - 1], y1 = ys[j];
  if (x1 <= x0) return std::min(y0, y1);
  const double frac = (type1 - x0) / (x1 - x0);
  return y0 + frac * (y1 - y0);
}

namespace {

double TradeoffSlope(const TradeoffFn& f, double x) {
  if (f.subgradient) return f.subgradient(x);
  const double h = std::max(1e-7, 1e-7 * std::abs(x));
  const double lo = std::max(0.0, x - h), hi = std::min(1.0, x + h);
  if (hi <= lo) return 0.0;
  return (f.f(hi) - f.f(lo)) / (hi - lo);
}

}  // namespace

ConjugateValue ProfileFromTradeoff(const TradeoffFn& f, double eps,
                                   const ConjugateConfig& cfg) {
  // 1 + f*(-e^eps) = sup_x 1 - f(x) - e^eps x; the objective is concave in x.
  // The difference of exponentials is combined as e^b expm1(a - b), which
  // stays accurate when the two terms nearly cancel.
  const double rate = std::exp(eps);
  const auto objective = [&f, eps, rate](double x) {
    const double one_minus_f = 1.0 - f.f(x);
    if (x <= 0.0) return one_minus_f;
    if (one_minus_f <= 0.0) return one_minus_f - rate * x;
    const double a = std::log(one_minus_f);
    const double b = eps + std::log(x);
    return std::exp(b) * std::expm1(a - b);
  };
  const int n = cfg.grid_points;
  const double dx = 1.0 / (n - 1);
  double best = -kInf;
  int best_i = 0;
  for (int i = 0; i < n; ++i) {
    const double v = objective(i * dx);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  // One Newton refinement on g'(x) = -f'(x) - rate around the best grid
  // point; kept only when it lands inside the bracket and improves.
  const double x0 = best_i * dx;
  const double lo = std::max(0.0, x0 - dx), hi = std::min(1.0, x0 + dx);
  const double g1 = -TradeoffSlope(f, x0) - rate;
  const double d2 = (TradeoffSlope(f, std::min(1.0, x0 + dx)) -
                     TradeoffSlope(f, std::max(0.0, x0 - dx))) /
                    (hi - lo);
  if (std::isfinite(g1) && std::isfinite(d2) && d2 < 0) {
    const double x_newton = x0 - g1 / d2;
    if (x_newton > lo && x_newton < hi) {
      best = std::max(best, objective(x_newton));
    }
  }
  const double slope_lo = std::abs(-TradeoffSlope(f, lo) - rate);
  const double slope_hi = std::abs(-TradeoffSlope(f, hi) - rate);
  double err = 0.5 * dx * std::max(slope_lo, slope_hi);
  if (!std::isfinite(err)) err = dx * rate;
  return {Clamp01(best), err};
}

double TradeoffFromProfile(const PrivacyProfile& pq_profile, double type1) {
  if (type1 < 0 || type1 > 1) {
    throw std::domain_error("TradeoffFromProfile: type I error must be in [0,1]");
  }
  const auto& h = pq_profile.delta_of_alpha;
  const auto objective = [&](double eps) {
    const double delta = std::max(0.0, h(std::exp(eps)));
    const double primal = 1.0 - delta - std::exp(eps) * type1;
    const double dual = std::exp(-eps) * (1.0 - delta - type1);
    return std::max(0.0, std::max(primal, dual));
  };

  // eps grid: {0} plus log-spaced values; the best bracket is refined by
  // golden section.
  std::vector<double> grid;
  grid.push_back(0.0);
  const int kGrid = 800;
  for (int i = 0; i < kGrid; ++i) {
    grid.push_back(std::exp(-8.0 + 12.0 * i / (kGrid - 1)));  // up to e^4 ~ 54
  }
  double best = 0.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = objective(grid[i]);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double lo = grid[best_i > 0 ? best_i - 1 : 0];
  double hi = grid[std::min(best_i + 1, grid.size() - 1)];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = objective(x1);
    }
  }
  best = std::max(best, std::max(f1, f2));
  return Clamp01(best);
}

PhiPair PhiFromTradeoff(const TradeoffFn& f, double t, const QuadConfig& cfg) {
  const auto log_abs_slope = [&](double x) {
    // Panel refinement can round nodes onto the endpoints; pull them back
    // into the open interval before differentiating.
    x = std::min(std::max(x, 5e-324), std::nextafter(1.0, 0.0));
    const double slope = TradeoffSlope(f, x);
    const double mag = std::abs(slope);
    if (mag == 0.0 || !std::isfinite(mag)) {
      throw std::invalid_argument(
          "PhiFromTradeoff: |f'| is 0 or infinite on the sampled support; "
          "mass at infinity must be handled by the caller");
    }
    return std::log(mag);
  };
  // Endpoint boundary layers (the slope of a trade-off function can blow up
  // at 0 and flatten near 1) get seeded panel edges.
  const std::vector<double> breaks = {1e-9,     1e-6,     1e-4,     1e-2,
                                      0.1,      0.5,      0.9,      0.99,
                                      1 - 1e-4, 1 - 1e-6, 1 - 1e-9, 1 - 1e-12};
  const auto integrate = [&](const std::function<double(double)>& fn) {
    return Integrate(fn, 0.0, 1.0, cfg, breaks).value;
  };
  const double re = integrate([&](double x) { return std::cos(t * log_abs_slope(x)); });
  const double im = integrate([&](double x) { return -std::sin(t * log_abs_slope(x)); });
  const double re_p = integrate([&](double x) {
    const double l = log_abs_slope(x);
    return std::cos(t * l) * std::exp(l);
  });
  const double im_p = integrate([&](double x) {
    const double l = log_abs_slope(x);
    return std::sin(t * l) * std::exp(l);
  });
  return {{re, im}, {re_p, im_p}};
}

double GFromF(const DiscretePair& pair, double x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const double loss = pair.Loss(i);
    if (loss <= x) acc += std::exp(pair.logp[i] - loss);
  }
  return acc;
}

double GFromF(const std::function<double(double)>& F, double x, double t_lo,
              int steps) {
  if (!(x > t_lo)) return 0.0;
  const double dt = (x - t_lo) / steps;
  double acc = 0.0;
  double first_cell = 0.0;
  double prev = F(t_lo);
  for (int i = 1; i <= steps; ++i) {
    const double t = t_lo + i * dt;
    const double cur = F(t);
    const double contribution = std::exp(-(t - 0.5 * dt)) * (cur - prev);
    if (i == 1) first_cell = contribution;
    acc += contribution;
    prev = cur;
  }
  // A tilted integral whose leftmost cell still carries weight has not
  // converged on the truncated interval.
  if (first_cell > 1e-6 * std::max(acc, 1e-300)) {
    std::ostringstream msg;
    msg << "GFromF: exponentially tilted integral did not converge at the "
           "truncation point t_lo="
        << t_lo << " (first-cell contribution " << first_cell << ")";
    throw NumericalError(msg.str(), first_cell);
  }
  return acc;
}

RenyiResult RenyiFromProfile(const PrivacyProfile& pq_profile,
                             const PrivacyProfile& qp_profile, double alpha,
                             const QuadConfig& cfg) {
  if (alpha <= 1) {
    throw std::domain_error("RenyiFromProfile: requires alpha > 1");
  }
  // E_Q[(dP/dQ)^alpha] = 1 + alpha (alpha-1) *
  //   int_0^inf e^{(alpha-1) eps} H_{e^eps}(P||Q) + e^{-alpha eps}
  //   H_{e^eps}(Q||P) d eps,
  // obtained from the layer-cake identity x^a = a(a-1) int (x-u)_+ u^{a-2} du
  // with the negative-eps half folded through the swap identity. (The
  // exponents differ by one from a restatement that tracks the moment under
  // P instead of Q; the Gaussian closed form pins this version.)
  const auto integrand = [&](double eps) {
    const double hp = std::max(0.0, pq_profile(std::exp(eps)));
    const double hq = std::max(0.0, qp_profile(std::exp(eps)));
    // log-domain products: e^{(alpha-1) eps} overflows long after the
    // profile term has decayed to zero.
    const double t1 =
        hp > 0 ? std::exp((alpha - 1.0) * eps + std::log(hp)) : 0.0;
    const double t2 = hq > 0 ? std::exp(-alpha * eps + std::log(hq)) : 0.0;
    return t1 + t2;
  };
  // The exponential weighting diverges for heavy-tailed profiles; probe the
  // far tail before integrating.
  if (integrand(80.0) > 1e-6 && integrand(160.0) > integrand(80.0)) {
    return {kInf, 0.0, true};
  }
  const QuadResult integral =
      Integrate(MapInfinite(integrand), 0.0, 1.0, cfg,
                {0.1, 0.3, 0.5, 0.7, 0.9, 0.99});
  const double scaled = alpha * (alpha - 1.0) * integral.value;
  RenyiResult out;
  out.value = std::log1p(scaled) / (alpha - 1.0);
  out.err_estimate =
      alpha * integral.err_estimate / (1.0 + scaled);
  out.diverged = !integral.converged;
  return out;
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormalQuantile(double p) {
  static const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
  if (p <= 0) return kNegInf;
  if (p >= 1) return kInf;
  return boost::math::quantile(kStdNormal, p);
}

double AnalyticGaussianDelta(double mu, double eps) {
  if (mu <= 0) throw std::invalid_argument("AnalyticGaussianDelta: mu > 0");
  const double v = NormalCdf(0.5 * mu - eps / mu) -
                   std::exp(eps) * NormalCdf(-0.5 * mu - eps / mu);
  return Clamp01(v);
}

double AnalyticGaussianEps(double mu, double delta) {
  if (delta <= 0 || delta >= 1) {
    throw std::invalid_argument("AnalyticGaussianEps: delta must be in (0,1)");
  }
  double lo = -60.0, hi = 1.0;
  while (AnalyticGaussianDelta(mu, hi) > delta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("AnalyticGaussianEps: no bracket", 0.0);
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi));
       ++i) {
    const double mid = 0.5 * (lo + hi);
    (AnalyticGaussianDelta(mu, mid) > delta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PrivacyProfile GaussianProfile(double sigma, int k) {
  if (sigma <= 0 || k < 1) {
    throw std::invalid_argument("GaussianProfile: sigma > 0 and k >= 1");
  }
  const double mu = std::sqrt(static_cast<double>(k)) / sigma;
  return {[mu](double alpha) {
            if (alpha < 0) {
              throw std::domain_error("profile: alpha must be >= 0");
            }
            if (alpha == 0) return 1.0;
            return AnalyticGaussianDelta(mu, std::log(alpha));
          },
          Provenance::kExact};
}

PrivacyProfile RrProfile(double p) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("RrProfile: p in (0,1)");
  return {[p](double alpha) {
            if (alpha < 0) {
              throw std::domain_error("profile: alpha must be >= 0");
            }
            return std::max(0.0, p - alpha * (1.0 - p)) +
                   std::max(0.0, (1.0 - p) - alpha * p);
          },
          Provenance::kExact};
}

TradeoffFn GaussianTradeoff(double sigma, int k) {
  if (sigma <= 0 || k < 1) {
    throw std::invalid_argument("GaussianTradeoff: sigma > 0 and k >= 1");
  }
  const double mu = std::sqrt(static_cast<double>(k)) / sigma;
  // Upper quantile evaluated through the accurate branch on each side.
  const auto upper_quantile = [](double x) {
    return x <= 0.5 ? -NormalQuantile(x) : NormalQuantile(1.0 - x);
  };
  TradeoffFn out;
  out.f = [mu, upper_quantile](double x) {
    if (x <= 0) return 1.0;
    if (x >= 1) return 0.0;
    return NormalCdf(upper_quantile(x) - mu);
  };
  out.subgradient = [mu, upper_quantile](double x) {
    if (x <= 0) return kNegInf;
    if (x >= 1) return -0.0;
    return -std::exp(mu * upper_quantile(x) - 0.5 * mu * mu);
  };
  return out;
}

TradeoffFn RrTradeoff(double p) {
  if (p <= 0.5 || p >= 1) {
    throw std::invalid_argument("RrTradeoff: p in (0.5, 1)");
  }
  const double ratio = p / (1.0 - p);
  TradeoffFn out;
  out.f = [p, ratio](double x) {
    if (x <= 0) return 1.0;
    if (x >= 1) return 0.0;
    if (x <= 1.0 - p) return 1.0 - ratio * x;
    return (1.0 - x) / ratio;
  };
  out.subgradient = [p, ratio](double x) {
    return x <= 1.0 - p ? -ratio : -1.0 / ratio;
  };
  return out;
}

DiscretePair RrPair(double p) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("RrPair: p in (0,1)");
  return DiscretePair::FromMasses({"0", "1"}, {p, 1.0 - p}, {1.0 - p, p});
}

}  // namespace afa
