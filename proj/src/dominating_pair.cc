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
#include "afa/dominating_pair.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "afa/parallel.h"

namespace afa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// log(gamma e^z + 1 - gamma), stable for large |z|.
double MixLog(double gamma, double z) {
  const double a = std::log(gamma) + z;
  const double b = std::log1p(-gamma);
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double SubsampledGaussianHs(double sigma, double gamma, MixtureDirection dir,
                            double alpha) {
  if (alpha == 0) return 1.0;
  const double s2 = sigma * sigma;
  if (dir == MixtureDirection::kRemove) {
    // P = (1-gamma) N(0,s2) + gamma N(1,s2), Q = N(0,s2); loss increasing in o.
    if (alpha <= 1.0 - gamma) return 1.0 - alpha;
    const double z = std::log((alpha - (1.0 - gamma)) / gamma);
    const double o = (2.0 * s2 * z + 1.0) / 2.0;
    const double p_tail = gamma * NormalCdf((1.0 - o) / sigma) +
                          (1.0 - gamma) * NormalCdf(-o / sigma);
    const double q_tail = NormalCdf(-o / sigma);
    return Clamp01(p_tail - alpha * q_tail);
  }
  // P = N(1,s2), Q = (1-gamma) N(1,s2) + gamma N(0,s2).
  if (gamma < 1.0 && alpha >= 1.0 / (1.0 - gamma)) return 0.0;
  const double inv = 1.0 / alpha - (1.0 - gamma);
  if (inv <= 0) return 0.0;
  const double z = -std::log(inv / gamma);
  const double o = (2.0 * s2 * z + 1.0) / 2.0;
  const double p_tail = NormalCdf((1.0 - o) / sigma);
  const double q_tail = (1.0 - gamma) * NormalCdf((1.0 - o) / sigma) +
                        gamma * NormalCdf(-o / sigma);
  return Clamp01(p_tail - alpha * q_tail);
}

double LaplaceHs(double lambda, double alpha) {
  if (alpha == 0) return 1.0;
  const double eps = std::log(alpha);
  if (eps >= 1.0 / lambda) return 0.0;
  if (eps <= -1.0 / lambda) return 1.0 - alpha;
  const double o = (1.0 - eps * lambda) / 2.0;  // threshold in (0,1)
  const double p_low = 1.0 - 0.5 * std::exp(-o / lambda);
  const double q_low = 0.5 * std::exp((o - 1.0) / lambda);
  return Clamp01(p_low - alpha * q_low);
}

}  // namespace

DominatingPair DominatingPair::Gaussian(double sigma, Relation rel) {
  if (sigma <= 0) throw std::invalid_argument("DominatingPair: sigma > 0");
  DominatingPair out;
  out.kind_ = Kind::kGaussian;
  out.sigma_ = sigma;
  out.relation_ = rel;
  out.tight_ = true;
  return out;
}

DominatingPair DominatingPair::Laplace(double lambda, Relation rel) {
  if (lambda <= 0) throw std::invalid_argument("DominatingPair: lambda > 0");
  DominatingPair out;
  out.kind_ = Kind::kLaplace;
  out.lambda_ = lambda;
  out.relation_ = rel;
  out.tight_ = true;
  return out;
}

DominatingPair DominatingPair::Rr(double p, Relation rel) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("DominatingPair: p in (0,1)");
  DominatingPair out;
  out.kind_ = Kind::kRr;
  out.p_ = p;
  out.relation_ = rel;
  out.tight_ = true;
  return out;
}

DominatingPair DominatingPair::SubsampledGaussian(double sigma, double gamma,
                                                  MixtureDirection dir,
                                                  Relation rel) {
  if (sigma <= 0) throw std::invalid_argument("DominatingPair: sigma > 0");
  if (gamma <= 0 || gamma > 1) {
    throw std::invalid_argument("DominatingPair: gamma in (0,1]");
  }
  DominatingPair out;
  out.kind_ = Kind::kSubsampledGaussian;
  out.sigma_ = sigma;
  out.gamma_ = gamma;
  out.mix_dir_ = dir;
  out.relation_ = rel;
  out.tight_ = true;
  return out;
}

DominatingPair DominatingPair::Discrete(DiscretePair pair, Relation rel,
                                        bool tight) {
  pair.Validate();
  DominatingPair out;
  out.kind_ = Kind::kDiscrete;
  out.discrete_ = std::move(pair);
  out.relation_ = rel;
  out.tight_ = tight;
  return out;
}

DominatingPair DominatingPair::ProfileDerived(std::vector<double> p_cell_mass,
                                              double atom_at_one, Relation rel) {
  DominatingPair out;
  out.kind_ = Kind::kProfileDerived;
  out.p_cell_ = std::move(p_cell_mass);
  out.atom_at_one_ = atom_at_one;
  out.relation_ = rel;
  return out;
}

const DiscretePair& DominatingPair::discrete() const {
  if (!discrete_.has_value()) {
    throw std::logic_error("DominatingPair: not a discrete repr");
  }
  return *discrete_;
}

double DominatingPair::Hs(double alpha) const {
  if (alpha < 0) throw std::domain_error("Hs: alpha must be >= 0");
  switch (kind_) {
    case Kind::kGaussian:
      if (alpha == 0) return 1.0;
      return AnalyticGaussianDelta(1.0 / sigma_, std::log(alpha));
    case Kind::kLaplace:
      return LaplaceHs(lambda_, alpha);
    case Kind::kRr:
      return std::max(0.0, p_ - alpha * (1.0 - p_)) +
             std::max(0.0, (1.0 - p_) - alpha * p_);
    case Kind::kSubsampledGaussian:
      return SubsampledGaussianHs(sigma_, gamma_, mix_dir_, alpha);
    case Kind::kDiscrete:
      return HockeyStick(*discrete_, alpha);
    case Kind::kProfileDerived: {
      const double cell_q = 1.0 / static_cast<double>(p_cell_.size());
      const std::size_t n = p_cell_.size();
      const double* cells = p_cell_.data();
      const double sum = BlockSum<double>(n, [cells, cell_q, alpha](std::size_t i) {
        const double diff = cells[i] - alpha * cell_q;
        return diff > 0 ? diff : 0.0;
      });
      return sum + atom_at_one_;
    }
  }
  throw std::logic_error("DominatingPair: unknown kind");
}

PrivacyProfile DominatingPair::Profile() const {
  DominatingPair copy = *this;
  return {[copy](double alpha) { return copy.Hs(alpha); }, Provenance::kExact};
}

namespace {

// Coarsens a continuous pair given by CDFs into `budget` cells over
// [lo, hi]; tail mass is folded into the edge cells.
DiscretePair BinContinuousPair(const std::function<double(double)>& p_cdf,
                               const std::function<double(double)>& q_cdf,
                               double lo, double hi, long budget) {
  std::vector<std::string> labels(budget);
  std::vector<double> p(budget), q(budget);
  const double width = (hi - lo) / static_cast<double>(budget);
  double prev_p = 0.0, prev_q = 0.0;  // CDFs below `lo` folded into cell 0
  for (long i = 0; i < budget; ++i) {
    const double edge = (i + 1 == budget) ? kInf : lo + width * (i + 1);
    const double cp = i + 1 == budget ? 1.0 : p_cdf(edge);
    const double cq = i + 1 == budget ? 1.0 : q_cdf(edge);
    labels[i] = std::to_string(i);
    p[i] = std::max(0.0, cp - prev_p);
    q[i] = std::max(0.0, cq - prev_q);
    prev_p = cp;
    prev_q = cq;
  }
  return DiscretePair::FromMasses(std::move(labels), p, q);
}

}  // namespace

DiscretePair DominatingPair::ToDiscrete(long atom_budget) const {
  if (atom_budget < 2) {
    throw std::invalid_argument("ToDiscrete: atom budget too small");
  }
  switch (kind_) {
    case Kind::kGaussian: {
      const double s = sigma_;
      const double lo = -10.0 * s, hi = 1.0 + 10.0 * s;
      return BinContinuousPair(
          [s](double x) { return NormalCdf((x - 1.0) / s); },
          [s](double x) { return NormalCdf(x / s); }, lo, hi, atom_budget);
    }
    case Kind::kLaplace: {
      const double l = lambda_;
      const auto lap_cdf = [l](double x, double mean) {
        const double z = x - mean;
        return z < 0 ? 0.5 * std::exp(z / l) : 1.0 - 0.5 * std::exp(-z / l);
      };
      const double lo = -25.0 * l, hi = 1.0 + 25.0 * l;
      return BinContinuousPair(
          [&](double x) { return lap_cdf(x, 0.0); },
          [&](double x) { return lap_cdf(x, 1.0); }, lo, hi, atom_budget);
    }
    case Kind::kRr:
      return RrPair(p_);
    case Kind::kSubsampledGaussian: {
      const double s = sigma_, g = gamma_;
      const auto n0 = [s](double x) { return NormalCdf(x / s); };
      const auto n1 = [s](double x) { return NormalCdf((x - 1.0) / s); };
      std::function<double(double)> p_cdf, q_cdf;
      if (mix_dir_ == MixtureDirection::kRemove) {
        p_cdf = [=](double x) { return (1.0 - g) * n0(x) + g * n1(x); };
        q_cdf = n0;
      } else {
        p_cdf = n1;
        q_cdf = [=](double x) { return (1.0 - g) * n1(x) + g * n0(x); };
      }
      return BinContinuousPair(p_cdf, q_cdf, -10.0 * s, 1.0 + 10.0 * s,
                               atom_budget);
    }
    case Kind::kDiscrete:
      return *discrete_;
    case Kind::kProfileDerived: {
      const long m = static_cast<long>(p_cell_.size());
      std::vector<std::string> labels;
      std::vector<double> p, q;
      labels.reserve(m + 1);
      const double cell_q = 1.0 / static_cast<double>(m);
      for (long i = 0; i < m; ++i) {
        labels.push_back(std::to_string(i));
        p.push_back(p_cell_[i]);
        q.push_back(cell_q);
      }
      if (atom_at_one_ > 0) {
        labels.push_back("atom@1");
        p.push_back(atom_at_one_);
        q.push_back(0.0);
      }
      return DiscretePair::FromMasses(std::move(labels), p, q);
    }
  }
  throw std::logic_error("DominatingPair: unknown kind");
}

DominatingPair PairFromProfile(const PrivacyProfile& h,
                               const PairFromProfileConfig& cfg) {
  // Membership checks: H(0) = 1, nonincreasing, convex, above (1-alpha)_+.
  const auto eval = [&h](double alpha) { return h(alpha); };
  if (std::abs(eval(0.0) - 1.0) > 1e-8) {
    throw std::invalid_argument("PairFromProfile: profile violates H(0) = 1");
  }
  {
    std::vector<double> grid = {0.0};
    for (int i = 0; i < 400; ++i) {
      grid.push_back(std::exp(-12.0 + 24.0 * i / 399.0));
    }
    double prev = eval(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double cur = eval(grid[i]);
      if (cur > prev + 1e-9) {
        throw std::invalid_argument(
            "PairFromProfile: profile violates monotonicity (not "
            "nonincreasing)");
      }
      if (cur < std::max(0.0, 1.0 - grid[i]) - 1e-9) {
        throw std::invalid_argument(
            "PairFromProfile: profile violates the (1-alpha)_+ floor");
      }
      prev = cur;
    }
    for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
      const double mid = 0.5 * (grid[i] + grid[i + 2]);
      if (eval(mid) > 0.5 * (eval(grid[i]) + eval(grid[i + 2])) + 1e-9) {
        throw std::invalid_argument(
            "PairFromProfile: profile violates convexity");
      }
    }
  }

  // Conjugate H*(y) = sup_{alpha >= 0} alpha y - H(alpha) on a log-spaced
  // alpha grid; y = x - 1 ranges over [-1, 0].
  std::vector<double> alphas = {0.0};
  for (int i = 0; i < cfg.conjugate_grid; ++i) {
    alphas.push_back(
        std::exp(-14.0 + 28.0 * i / (cfg.conjugate_grid - 1.0)));
  }
  std::vector<double> h_values(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    h_values[i] = std::max(0.0, eval(alphas[i]));
  }
  const auto conjugate = [&](double y) {
    double best = -kInf;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      best = std::max(best, alphas[i] * y - h_values[i]);
    }
    return best;
  };

  const int m = cfg.cells;
  std::vector<double> cdf(m + 1);
  for (int i = 0; i <= m; ++i) {
    const double x = static_cast<double>(i) / m;
    // Left limit at x -> 1^-: the atom at 1 is handled separately below.
    const double y = (i == m) ? -1e-12 : x - 1.0;
    cdf[i] = Clamp01(1.0 + conjugate(y));
  }
  for (int i = 1; i <= m; ++i) cdf[i] = std::max(cdf[i], cdf[i - 1]);
  std::vector<double> cells(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    cells[i] = cdf[i + 1] - cdf[i];
    total += cells[i];
  }
  cells[0] += cdf[0];  // any mass at x = 0 stays in the first cell
  total += cdf[0];
  const double atom = std::max(0.0, 1.0 - total);
  return DominatingPair::ProfileDerived(std::move(cells), atom,
                                        Relation::kSymmetric);
}

PrivacyProfile HsClosure(const std::function<double(double)>& h) {
  // Sample, running-min, clamp at 1, then lower convex envelope.
  std::vector<double> alphas = {0.0};
  const int kPoints = 2400;
  for (int i = 0; i < kPoints; ++i) {
    alphas.push_back(std::exp(-14.0 + 28.0 * i / (kPoints - 1.0)));
  }
  std::vector<double> v(alphas.size());
  double running = kInf;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    running = std::min(running, h(alphas[i]));
    v[i] = std::min(1.0, running);
  }
  // Lower convex hull (monotone chain over the sorted alphas).
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (alphas[b] - alphas[a]) * (v[i] - v[a]) -
                           (alphas[i] - alphas[a]) * (v[b] - v[a]);
      if (cross <= 0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  std::vector<double> hx, hy;
  for (std::size_t idx : hull) {
    hx.push_back(alphas[idx]);
    hy.push_back(v[idx]);
  }
  return {[hx = std::move(hx), hy = std::move(hy)](double alpha) {
            if (alpha < 0) {
              throw std::domain_error("profile: alpha must be >= 0");
            }
            const auto it = std::upper_bound(hx.begin(), hx.end(), alpha);
            if (it == hx.begin()) return hy.front();
            const std::size_t j = static_cast<std::size_t>(it - hx.begin());
            if (j >= hx.size()) return hy.back();
            const double frac = (alpha - hx[j - 1]) / (hx[j] - hx[j - 1]);
            return hy[j - 1] + frac * (hy[j] - hy[j - 1]);
          },
          Provenance::kUpperBound};
}

DominatingPair ComposePairs(const DominatingPair& a, const DominatingPair& b,
                            long factor_budget, long product_budget) {
  const DiscretePair da = a.ToDiscrete(factor_budget);
  const DiscretePair db = b.ToDiscrete(factor_budget);
  const long n = static_cast<long>(da.size()) * static_cast<long>(db.size());
  if (n > product_budget) {
    std::ostringstream msg;
    msg << "ComposePairs: product would need " << n << " atoms (budget "
        << product_budget << "); use the phi ledger for long compositions";
    throw std::invalid_argument(msg.str());
  }
  std::vector<std::string> labels;
  std::vector<double> p, q;
  labels.reserve(n);
  p.reserve(n);
  q.reserve(n);
  for (std::size_t i = 0; i < da.size(); ++i) {
    for (std::size_t j = 0; j < db.size(); ++j) {
      labels.push_back(std::to_string(i) + ":" + std::to_string(j));
      p.push_back(std::exp(da.logp[i] + db.logp[j]));
      q.push_back(std::exp(da.logq[i] + db.logq[j]));
    }
  }
  // Mass landing outside the finite-by-finite block has an infinite loss on
  // one side: 1 - (1-a_inf)(1-b_inf) per side.
  const double p_inf =
      -std::expm1(std::log1p(-da.PInfMass()) + std::log1p(-db.PInfMass()));
  const double q_inf =
      -std::expm1(std::log1p(-da.QInfMass()) + std::log1p(-db.QInfMass()));
  if (p_inf > 0) {
    labels.push_back("p-inf");
    p.push_back(p_inf);
    q.push_back(0.0);
  }
  if (q_inf > 0) {
    labels.push_back("q-inf");
    p.push_back(0.0);
    q.push_back(q_inf);
  }
  Relation rel = a.relation() == b.relation() ? a.relation() : Relation::kSymmetric;
  return DominatingPair::Discrete(
      DiscretePair::FromMasses(std::move(labels), p, q), rel,
      a.tight() && b.tight());
}

namespace {

// Mixture pair construction shared by Amplify and the symmetric two-piece
// profile; no relation validation here.
DominatingPair MixturePair(const DominatingPair& pair, double gamma,
                           MixtureDirection direction, Relation out_rel) {
  if (pair.kind() == DominatingPair::Kind::kGaussian) {
    return DominatingPair::SubsampledGaussian(pair.sigma(), gamma, direction,
                                              out_rel);
  }
  const DiscretePair base = pair.ToDiscrete();
  std::vector<std::string> labels;
  std::vector<double> p, q;
  const std::size_t n = base.size();
  labels.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = std::exp(base.logp[i]);
    const double qi = std::exp(base.logq[i]);
    labels.push_back(base.outcomes[i]);
    if (direction == MixtureDirection::kRemove) {
      p.push_back((1.0 - gamma) * qi + gamma * pi);
      q.push_back(qi);
    } else {
      p.push_back(pi);
      q.push_back((1.0 - gamma) * pi + gamma * qi);
    }
  }
  const double base_p_inf = base.PInfMass();
  const double base_q_inf = base.QInfMass();
  if (base_p_inf > 0) {
    labels.push_back("p-inf");
    if (direction == MixtureDirection::kRemove) {
      p.push_back(gamma * base_p_inf);
      q.push_back(0.0);
    } else {
      p.push_back(base_p_inf);
      q.push_back((1.0 - gamma) * base_p_inf);
    }
  }
  if (base_q_inf > 0) {
    labels.push_back("q-inf");
    if (direction == MixtureDirection::kRemove) {
      p.push_back((1.0 - gamma) * base_q_inf);
      q.push_back(base_q_inf);
    } else {
      p.push_back(0.0);
      q.push_back(gamma * base_q_inf);
    }
  }
  return DominatingPair::Discrete(
      DiscretePair::FromMasses(std::move(labels), p, q), out_rel, false);
}

}  // namespace

DominatingPair Amplify(const DominatingPair& pair, const SamplingScheme& scheme,
                       MixtureDirection direction) {
  if (scheme.gamma <= 0 || scheme.gamma > 1) {
    throw std::invalid_argument("Amplify: gamma in (0,1]");
  }
  const Relation rel = pair.relation();
  if (scheme.kind == SamplingKind::kPoisson) {
    if (rel == Relation::kReplace) {
      throw std::invalid_argument(
          "Amplify: Poisson sampling requires an add/remove (or symmetric) "
          "relation dominating pair");
    }
  } else {
    if (rel != Relation::kReplace) {
      throw std::invalid_argument(
          "Amplify: subset sampling requires a replace-relation dominating "
          "pair");
    }
  }
  const Relation out_rel = direction == MixtureDirection::kAdd
                               ? Relation::kAdd
                               : Relation::kRemove;
  return MixturePair(pair, scheme.gamma, direction, out_rel);
}

double SubsampleProfileSymmetric(const DominatingPair& pair,
                                 const SamplingScheme& scheme, double alpha) {
  if (pair.relation() != Relation::kSymmetric) {
    throw std::invalid_argument(
        "SubsampleProfileSymmetric: requires a symmetric-relation pair");
  }
  if (alpha < 0) throw std::domain_error("alpha must be >= 0");
  const MixtureDirection dir =
      alpha >= 1.0 ? MixtureDirection::kRemove : MixtureDirection::kAdd;
  return MixturePair(pair, scheme.gamma, dir, Relation::kSymmetric).Hs(alpha);
}

DominatingPair DominateFullRange(const DominatingPair& pair) {
  const DominatingPair base = pair;
  const auto full = [base](double alpha) {
    if (alpha >= 1.0) return base.Hs(alpha);
    if (alpha == 0.0) return 1.0;
    // Swap identity: H_alpha(Q||P) = alpha H_{1/alpha}(P||Q) - alpha + 1.
    return alpha * base.Hs(1.0 / alpha) - alpha + 1.0;
  };
  return PairFromProfile(HsClosure(full));
}

}  // namespace afa
