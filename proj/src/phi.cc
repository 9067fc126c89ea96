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
#include "afa/phi.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <variant>

#include "afa/errors.h"
#include "afa/parallel.h"
#include "afa/quadrature.h"

namespace afa {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
using Complex = std::complex<double>;

double LogSumExp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

std::string FormatKey(const char* kind, std::initializer_list<double> params) {
  std::ostringstream out;
  out.precision(17);
  out << kind;
  for (double p : params) out << ':' << p;
  return out.str();
}

std::uint64_t HashDoubles(std::uint64_t seed, const std::vector<double>& v) {
  // FNV-1a over the raw bit patterns.
  std::uint64_t h = seed ^ 0xcbf29ce484222325ULL;
  for (double d : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

struct GaussianPhi {
  double sigma;
};
struct LaplacePhi {
  double lambda;
};
struct RrPhi {
  double p;
};
struct AtomsPhi {
  AtomList p_atoms;
  AtomList q_atoms;
  bool grid_side;  // true when the two directions are grid approximations
};
struct QuadMixturePhi {
  double sigma;
  double gamma;
  MixtureDirection dir;
  // Frozen nodes in the o domain with combined quadrature*jacobian weights.
  std::vector<double> node_weight;  // w * jac
  std::vector<double> p_density;
  std::vector<double> q_density;
  std::vector<double> loss;  // L_{P,Q}(o)
  double mass_defect = 0.0;
};

using TermVariant =
    std::variant<GaussianPhi, LaplacePhi, RrPhi, AtomsPhi, QuadMixturePhi>;

double NormalDensity(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// log(gamma e^z + 1 - gamma), stable for large |z|.
double MixtureLogRatio(double gamma, double z) {
  return LogSumExp2(std::log(gamma) + z, std::log1p(-gamma));
}

// Privacy loss of the subsampled-Gaussian pair at output o.
double SubsampledGaussianLoss(double sigma, double gamma, MixtureDirection dir,
                              double o) {
  const double z = (2.0 * o - 1.0) / (2.0 * sigma * sigma);
  if (dir == MixtureDirection::kRemove) return MixtureLogRatio(gamma, z);
  return -MixtureLogRatio(gamma, -z);
}

}  // namespace

AtomList AtomList::Build(std::vector<double> loss,
                         std::vector<double> log_mass) {
  if (loss.size() != log_mass.size()) {
    throw std::invalid_argument("AtomList: length mismatch");
  }
  AtomList out;
  double anchor = kNegInf;
  for (double lm : log_mass) anchor = std::max(anchor, lm);
  if (anchor == kNegInf) {
    throw std::invalid_argument("AtomList: empty finite support");
  }
  // Atoms whose relative weight is below 1e-22 cannot move a 1e5-term sum at
  // double precision; dropping them keeps the hot loop on live cells only.
  // The dropped mass still counts toward the total.
  constexpr double kLogPruneRel = -50.7;  // log(1e-22)
  out.anchor = anchor;
  double total_w = 0.0;
  for (std::size_t i = 0; i < log_mass.size(); ++i) {
    const double w = std::exp(log_mass[i] - anchor);
    total_w += w;
    if (log_mass[i] - anchor >= kLogPruneRel) {
      out.loss.push_back(loss[i]);
      out.log_mass.push_back(log_mass[i]);
      out.weight.push_back(w);
    }
  }
  out.log_total_mass = anchor + std::log(total_w);
  return out;
}

struct PhiTerm::Impl {
  TermVariant term;
  std::string key;
  double log_finite_mass_p = 0.0;
  double log_finite_mass_q = 0.0;

  mutable std::mutex cache_mu;
  mutable std::unordered_map<std::uint64_t, Complex> cache_p, cache_q;

  // Complex log-sum-exp over atoms, anchored at the largest log-mass.
  Complex LogPhiAtoms(const AtomList& atoms, double t) const {
    const std::size_t n = atoms.loss.size();
    const double* loss = atoms.loss.data();
    const double* w = atoms.weight.data();
    const Complex sum = BlockSum<Complex>(n, [loss, w, t](std::size_t i) {
      return w[i] * Complex(std::cos(t * loss[i]), std::sin(t * loss[i]));
    });
    return atoms.anchor + std::log(sum);
  }

  Complex LogPhiUncached(double t, Direction dir) const {
    if (const auto* g = std::get_if<GaussianPhi>(&term)) {
      const double s2 = 2.0 * g->sigma * g->sigma;
      return Complex(-t * t / s2, t / s2);  // phi = phi'
    }
    if (const auto* l = std::get_if<LaplacePhi>(&term)) {
      const double lam = l->lambda;
      const Complex up = std::polar(1.0, t / lam);
      const Complex down = std::exp(-1.0 / lam) * std::polar(1.0, -t / lam);
      const Complex phi =
          0.5 * (up + down + (up - down) / Complex(1.0, 2.0 * t));
      return std::log(phi);  // phi = phi'
    }
    if (const auto* r = std::get_if<RrPhi>(&term)) {
      const double l0 = std::log(r->p / (1.0 - r->p));
      const Complex phi = r->p * std::polar(1.0, t * l0) +
                          (1.0 - r->p) * std::polar(1.0, -t * l0);
      return std::log(phi);  // phi = phi'
    }
    if (const auto* a = std::get_if<AtomsPhi>(&term)) {
      return LogPhiAtoms(dir == Direction::kP ? a->p_atoms : a->q_atoms, t);
    }
    const auto& qm = std::get<QuadMixturePhi>(term);
    const std::size_t n = qm.node_weight.size();
    const double* w = qm.node_weight.data();
    const double* dens =
        dir == Direction::kP ? qm.p_density.data() : qm.q_density.data();
    const double* loss = qm.loss.data();
    const double sign = dir == Direction::kP ? 1.0 : -1.0;
    const Complex sum =
        BlockSum<Complex>(n, [w, dens, loss, t, sign](std::size_t i) {
          const double phase = sign * t * loss[i];
          return w[i] * dens[i] * Complex(std::cos(phase), std::sin(phase));
        });
    return std::log(sum);
  }

  Complex LogPhi(double t, Direction dir) const {
    const bool cacheable = std::holds_alternative<AtomsPhi>(term) ||
                           std::holds_alternative<QuadMixturePhi>(term);
    if (!cacheable) return LogPhiUncached(t, dir);
    std::uint64_t bits;
    std::memcpy(&bits, &t, sizeof(bits));
    auto& cache = dir == Direction::kP ? cache_p : cache_q;
    {
      std::lock_guard<std::mutex> lock(cache_mu);
      const auto it = cache.find(bits);
      if (it != cache.end()) return it->second;
    }
    const Complex value = LogPhiUncached(t, dir);
    {
      std::lock_guard<std::mutex> lock(cache_mu);
      cache.emplace(bits, value);
    }
    return value;
  }
};

PhiTerm PhiTerm::Gaussian(double sigma) {
  if (sigma <= 0) throw std::invalid_argument("PhiTerm: sigma must be > 0");
  auto impl = std::make_shared<Impl>();
  impl->term = GaussianPhi{sigma};
  impl->key = FormatKey("gaussian", {sigma});
  return PhiTerm(std::move(impl));
}

PhiTerm PhiTerm::Laplace(double lambda) {
  if (lambda <= 0) throw std::invalid_argument("PhiTerm: lambda must be > 0");
  auto impl = std::make_shared<Impl>();
  impl->term = LaplacePhi{lambda};
  impl->key = FormatKey("laplace", {lambda});
  return PhiTerm(std::move(impl));
}

PhiTerm PhiTerm::Rr(double p) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("PhiTerm: p in (0,1)");
  auto impl = std::make_shared<Impl>();
  impl->term = RrPhi{p};
  impl->key = FormatKey("rr", {p});
  return PhiTerm(std::move(impl));
}

PhiTerm PhiTerm::Discrete(const DiscretePair& pair) {
  pair.Validate();
  if (pair.size() == 0) {
    throw std::invalid_argument("PhiTerm: empty finite support");
  }
  std::vector<double> loss_p(pair.size()), loss_q(pair.size());
  for (std::size_t i = 0; i < pair.size(); ++i) {
    loss_p[i] = pair.Loss(i);
    loss_q[i] = -pair.Loss(i);
  }
  auto impl = std::make_shared<Impl>();
  AtomsPhi atoms{AtomList::Build(loss_p, pair.logp),
                 AtomList::Build(loss_q, pair.logq), /*grid_side=*/false};
  impl->log_finite_mass_p = std::log1p(-pair.PInfMass());
  impl->log_finite_mass_q = std::log1p(-pair.QInfMass());
  std::uint64_t h = HashDoubles(1, atoms.p_atoms.loss);
  h = HashDoubles(h, atoms.p_atoms.log_mass);
  h = HashDoubles(h, atoms.q_atoms.log_mass);
  std::ostringstream key;
  key.precision(17);
  key << "discrete:" << h << ':' << pair.PInfMass() << ':' << pair.QInfMass();
  impl->key = key.str();
  impl->term = std::move(atoms);
  return PhiTerm(std::move(impl));
}

PhiTerm PhiTerm::FromAtoms(AtomList p_atoms, AtomList q_atoms,
                           std::string key) {
  auto impl = std::make_shared<Impl>();
  impl->log_finite_mass_p = p_atoms.log_total_mass;
  impl->log_finite_mass_q = q_atoms.log_total_mass;
  impl->term = AtomsPhi{std::move(p_atoms), std::move(q_atoms),
                        /*grid_side=*/true};
  impl->key = std::move(key);
  return PhiTerm(std::move(impl));
}

PhiTerm PhiTerm::QuadMixture(double sigma, double gamma, MixtureDirection dir,
                             const QuadMixtureConfig& cfg) {
  if (sigma <= 0) throw std::invalid_argument("QuadMixture: sigma > 0");
  if (gamma <= 0 || gamma > 1) {
    throw std::invalid_argument("QuadMixture: gamma in (0,1]");
  }
  QuadMixturePhi qm;
  qm.sigma = sigma;
  qm.gamma = gamma;
  qm.dir = dir;

  // Freeze an uneven node layout once: adaptively split the mapped o-axis on
  // the pair's total mass, then keep the Gauss-Legendre nodes of the final
  // panels for every later t.
  const int nodes_per_panel = 15;
  const int max_panels = std::max(4, cfg.node_budget / nodes_per_panel);
  const auto mass = [sigma, gamma, dir](double o) {
    const double n0 = NormalDensity(o, 0.0, sigma);
    const double n1 = NormalDensity(o, 1.0, sigma);
    if (dir == MixtureDirection::kRemove) {
      return (gamma * n1 + (1.0 - gamma) * n0) + n0;
    }
    return n1 + ((1.0 - gamma) * n1 + gamma * n0);
  };
  const auto mapped = MapInfinite(mass);

  struct Panel {
    double lo, hi, err;
  };
  const auto panel_error = [&](double lo, double hi) {
    const auto& fine_n = GaussLegendreNodes(nodes_per_panel);
    const auto& fine_w = GaussLegendreWeights(nodes_per_panel);
    const auto& coarse_n = GaussLegendreNodes(7);
    const auto& coarse_w = GaussLegendreWeights(7);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double vf = 0.0, vc = 0.0;
    for (std::size_t i = 0; i < fine_n.size(); ++i) {
      vf += fine_w[i] * mapped(mid + half * fine_n[i]);
    }
    for (std::size_t i = 0; i < coarse_n.size(); ++i) {
      vc += coarse_w[i] * mapped(mid + half * coarse_n[i]);
    }
    return std::abs(vf - vc) * half;
  };

  std::vector<Panel> panels;
  for (double edge = -1.0; edge < 1.0 - 1e-9; edge += 0.25) {
    panels.push_back({edge, edge + 0.25, panel_error(edge, edge + 0.25)});
  }
  while (static_cast<int>(panels.size()) < max_panels) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].err > panels[worst].err) worst = i;
    }
    if (panels[worst].err < cfg.mass_tol * 1e-3) break;
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.lo + p.hi);
    panels[worst] = {p.lo, mid, panel_error(p.lo, mid)};
    panels.push_back({mid, p.hi, panel_error(mid, p.hi)});
  }
  std::sort(panels.begin(), panels.end(),
            [](const Panel& a, const Panel& b) { return a.lo < b.lo; });

  const auto& nodes = GaussLegendreNodes(nodes_per_panel);
  const auto& weights = GaussLegendreWeights(nodes_per_panel);
  for (const Panel& p : panels) {
    const double mid = 0.5 * (p.lo + p.hi), half = 0.5 * (p.hi - p.lo);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double u = mid + half * nodes[i];
      const double om = 1.0 - u * u;
      const double o = u / om;
      const double jac = (1.0 + u * u) / (om * om);
      const double n0 = NormalDensity(o, 0.0, sigma);
      const double n1 = NormalDensity(o, 1.0, sigma);
      double p_dens, q_dens;
      if (dir == MixtureDirection::kRemove) {
        p_dens = gamma * n1 + (1.0 - gamma) * n0;
        q_dens = n0;
      } else {
        p_dens = n1;
        q_dens = (1.0 - gamma) * n1 + gamma * n0;
      }
      qm.node_weight.push_back(weights[i] * half * jac);
      qm.p_density.push_back(p_dens);
      qm.q_density.push_back(q_dens);
      qm.loss.push_back(SubsampledGaussianLoss(sigma, gamma, dir, o));
    }
  }

  double mass_p = 0.0, mass_q = 0.0;
  for (std::size_t i = 0; i < qm.node_weight.size(); ++i) {
    mass_p += qm.node_weight[i] * qm.p_density[i];
    mass_q += qm.node_weight[i] * qm.q_density[i];
  }
  qm.mass_defect = std::max(std::abs(mass_p - 1.0), std::abs(mass_q - 1.0));
  if (qm.mass_defect > cfg.mass_tol) {
    std::ostringstream msg;
    msg << "QuadMixture: node budget " << cfg.node_budget
        << " reached mass tolerance " << qm.mass_defect << " (requested "
        << cfg.mass_tol << ")";
    throw NumericalError(msg.str(), qm.mass_defect);
  }

  auto impl = std::make_shared<Impl>();
  impl->key = FormatKey(
      dir == MixtureDirection::kRemove ? "qm-remove" : "qm-add",
      {sigma, gamma, static_cast<double>(cfg.node_budget)});
  impl->term = std::move(qm);
  return PhiTerm(std::move(impl));
}

std::complex<double> PhiTerm::LogPhi(double t, Direction dir) const {
  return impl_->LogPhi(t, dir);
}

double PhiTerm::LogFiniteMass(Direction dir) const {
  return dir == Direction::kP ? impl_->log_finite_mass_p
                              : impl_->log_finite_mass_q;
}

double PhiTerm::InfMass(Direction dir) const {
  return -std::expm1(LogFiniteMass(dir));
}

bool PhiTerm::IsFiniteDiscrete() const {
  return std::holds_alternative<AtomsPhi>(impl_->term) ||
         std::holds_alternative<RrPhi>(impl_->term);
}

bool PhiTerm::IsGridSide() const {
  const auto* a = std::get_if<AtomsPhi>(&impl_->term);
  return a != nullptr && a->grid_side;
}

bool PhiTerm::IsQuadMixture() const {
  return std::holds_alternative<QuadMixturePhi>(impl_->term);
}

std::size_t PhiTerm::AtomCount() const {
  if (const auto* a = std::get_if<AtomsPhi>(&impl_->term)) {
    return a->p_atoms.loss.size();
  }
  if (std::holds_alternative<RrPhi>(impl_->term)) return 2;
  return 0;
}

std::vector<std::pair<double, double>> PhiTerm::Atoms(Direction dir) const {
  std::vector<std::pair<double, double>> out;
  if (const auto* a = std::get_if<AtomsPhi>(&impl_->term)) {
    const AtomList& atoms = dir == Direction::kP ? a->p_atoms : a->q_atoms;
    out.reserve(atoms.loss.size());
    for (std::size_t i = 0; i < atoms.loss.size(); ++i) {
      out.emplace_back(atoms.loss[i], std::exp(atoms.log_mass[i]));
    }
    return out;
  }
  if (const auto* r = std::get_if<RrPhi>(&impl_->term)) {
    const double l0 = std::log(r->p / (1.0 - r->p));
    out = {{l0, r->p}, {-l0, 1.0 - r->p}};
    return out;
  }
  throw std::logic_error("PhiTerm::Atoms: term is not discrete");
}

const std::string& PhiTerm::CanonicalKey() const { return impl_->key; }

LogPhiLedger LogPhiLedger::Append(const PhiTerm& term, long count) const {
  if (count < 1) throw std::invalid_argument("ledger: count must be >= 1");
  LogPhiLedger out = *this;
  for (Entry& e : out.entries_) {
    if (e.term.CanonicalKey() == term.CanonicalKey()) {
      e.multiplicity += count;
      return out;
    }
  }
  out.entries_.push_back({term, count});
  out.has_grid_terms_ = has_grid_terms_ || term.IsGridSide();
  return out;
}

std::complex<double> LogPhiLedger::Eval(double t, Direction dir) const {
  Complex acc(0.0, 0.0);
  for (const Entry& e : entries_) {
    acc += static_cast<double>(e.multiplicity) * e.term.LogPhi(t, dir);
  }
  return acc;
}

double LogPhiLedger::LogFiniteMass(Direction dir) const {
  double acc = 0.0;
  for (const Entry& e : entries_) {
    acc += static_cast<double>(e.multiplicity) * e.term.LogFiniteMass(dir);
  }
  return acc;
}

double LogPhiLedger::InfMass(Direction dir) const {
  return -std::expm1(LogFiniteMass(dir));
}

double LogPhiLedger::NoiseMultiplier() const {
  double total = 0.0;
  for (const Entry& e : entries_) {
    if (e.term.IsFiniteDiscrete() || e.term.IsQuadMixture()) {
      total += static_cast<double>(e.multiplicity);
    }
  }
  return total;
}

long LogPhiLedger::TotalCount() const {
  long total = 0;
  for (const Entry& e : entries_) total += e.multiplicity;
  return total;
}

std::optional<std::vector<std::pair<double, double>>>
LogPhiLedger::ComposedAtoms(Direction dir, std::size_t cap) const {
  using Atom = std::pair<double, double>;
  std::vector<Atom> acc = {{0.0, 1.0}};
  const auto coalesce = [](std::vector<Atom>& atoms) {
    std::sort(atoms.begin(), atoms.end());
    std::vector<Atom> merged;
    for (const Atom& a : atoms) {
      const double tol = 1e-12 * std::max(1.0, std::abs(a.first));
      if (!merged.empty() && a.first - merged.back().first <= tol) {
        merged.back().second += a.second;
      } else {
        merged.push_back(a);
      }
    }
    atoms = std::move(merged);
  };
  for (const Entry& e : entries_) {
    if (!e.term.IsFiniteDiscrete()) return std::nullopt;
    const std::vector<Atom> factor = e.term.Atoms(dir);
    for (long rep = 0; rep < e.multiplicity; ++rep) {
      if (acc.size() * factor.size() > cap) return std::nullopt;
      std::vector<Atom> next;
      next.reserve(acc.size() * factor.size());
      for (const Atom& a : acc) {
        for (const Atom& f : factor) {
          next.emplace_back(a.first + f.first, a.second * f.second);
        }
      }
      coalesce(next);
      if (next.size() > cap) return std::nullopt;
      acc = std::move(next);
    }
  }
  return acc;
}

double InfMassCombine(const std::vector<double>& pr_inf) {
  double log_acc = 0.0;
  for (double pr : pr_inf) {
    if (pr < 0 || pr > 1) {
      throw std::invalid_argument("InfMassCombine: probabilities in [0,1]");
    }
    if (pr == 1.0) {
      throw std::invalid_argument(
          "InfMassCombine: Pr[L = inf] = 1 is a degenerate mechanism");
    }
    log_acc += std::log1p(-pr);
  }
  return -std::expm1(log_acc);
}

}  // namespace afa
