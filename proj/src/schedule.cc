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
#include "afa/schedule.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "afa/errors.h"

namespace afa {

namespace {

using nlohmann::json;

Relation ParseRelation(const std::string& s) {
  if (s == "symmetric") return Relation::kSymmetric;
  if (s == "add") return Relation::kAdd;
  if (s == "remove") return Relation::kRemove;
  if (s == "replace") return Relation::kReplace;
  throw std::invalid_argument("schedule: unknown relation '" + s + "'");
}

SamplingSpec ParseSampling(const json& j) {
  SamplingSpec out;
  const std::string kind = j.value("kind", "poisson");
  if (kind == "poisson") {
    out.kind = SamplingKind::kPoisson;
  } else if (kind == "subset") {
    out.kind = SamplingKind::kSubset;
  } else {
    throw std::invalid_argument("schedule: unknown sampling kind '" + kind + "'");
  }
  if (!j.contains("gamma")) {
    throw std::invalid_argument("schedule: sampling needs gamma");
  }
  out.gamma = j.at("gamma").get<double>();
  if (out.gamma <= 0 || out.gamma > 1) {
    throw std::invalid_argument("schedule: gamma must be in (0,1]");
  }
  const std::string policy = j.value("direction", "both");
  if (policy == "both") {
    out.policy = DirectionPolicy::kBoth;
  } else if (policy == "add") {
    out.policy = DirectionPolicy::kAdd;
  } else if (policy == "remove") {
    out.policy = DirectionPolicy::kRemove;
  } else {
    throw std::invalid_argument("schedule: unknown direction '" + policy + "'");
  }
  return out;
}

MechanismSpec ParseMechanism(const json& j) {
  MechanismSpec spec;
  const std::string kind = j.value("kind", "");
  if (kind == "gaussian") {
    spec.kind = MechanismKind::kGaussian;
    spec.sigma = j.at("sigma").get<double>();
    if (spec.sigma <= 0) throw std::invalid_argument("schedule: sigma > 0");
  } else if (kind == "laplace") {
    spec.kind = MechanismKind::kLaplace;
    spec.lambda = j.at("lambda").get<double>();
    if (spec.lambda <= 0) throw std::invalid_argument("schedule: lambda > 0");
  } else if (kind == "rr") {
    spec.kind = MechanismKind::kRandomizedResponse;
    spec.p = j.at("p").get<double>();
    if (spec.p <= 0 || spec.p >= 1) {
      throw std::invalid_argument("schedule: rr p must be in (0,1)");
    }
  } else if (kind == "discrete") {
    spec.kind = MechanismKind::kDiscrete;
    const auto labels = j.at("labels").get<std::vector<std::string>>();
    const auto p = j.at("p").get<std::vector<double>>();
    const auto q = j.at("q").get<std::vector<double>>();
    spec.pair = DiscretePair::FromMasses(labels, p, q);
  } else {
    throw std::invalid_argument("schedule: unknown mechanism kind '" + kind + "'");
  }
  spec.count = j.value("count", 1L);
  if (spec.count < 1) throw std::invalid_argument("schedule: count >= 1");
  spec.relation = ParseRelation(j.value("relation", "symmetric"));
  if (j.contains("sampling")) spec.sampling = ParseSampling(j.at("sampling"));
  return spec;
}

}  // namespace

Schedule ParseScheduleJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("schedule: JSON parse error: ") +
                                e.what());
  }
  Schedule out;
  if (!j.contains("mechanisms") || !j.at("mechanisms").is_array()) {
    throw std::invalid_argument("schedule: 'mechanisms' array required");
  }
  for (const json& m : j.at("mechanisms")) {
    out.mechanisms.push_back(ParseMechanism(m));
  }
  if (j.contains("query")) {
    const json& q = j.at("query");
    if (q.contains("delta_at_eps")) {
      out.query = {ScheduleQuery::Kind::kDeltaAtEps,
                   q.at("delta_at_eps").get<double>()};
    } else if (q.contains("eps_at_delta")) {
      out.query = {ScheduleQuery::Kind::kEpsAtDelta,
                   q.at("eps_at_delta").get<double>()};
    } else {
      throw std::invalid_argument(
          "schedule: query must set delta_at_eps or eps_at_delta");
    }
  }
  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    out.quad.abs_tol = q.value("abs_tol", out.quad.abs_tol);
    out.quad.max_panels = q.value("max_panels", out.quad.max_panels);
    out.quad.nodes_per_panel =
        q.value("nodes_per_panel", out.quad.nodes_per_panel);
    if (out.quad.abs_tol <= 0 || out.quad.max_panels < 1 ||
        out.quad.nodes_per_panel < 2) {
      throw std::invalid_argument("schedule: invalid quadrature settings");
    }
  }
  if (j.contains("grid")) {
    GridSettings g;
    g.S = j.at("grid").value("S", g.S);
    g.N = j.at("grid").value("N", g.N);
    if (g.S <= 0 || g.N < 2) {
      throw std::invalid_argument("schedule: grid needs S > 0 and N >= 2");
    }
    out.grid = g;
  }
  return out;
}

Schedule ParseScheduleFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("schedule: cannot open file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseScheduleJson(buffer.str());
}

Accountant BuildAccountant(const Schedule& schedule, long k_scale) {
  if (k_scale < 1) throw std::invalid_argument("BuildAccountant: k >= 1");
  Accountant acct(schedule.quad);
  for (MechanismSpec spec : schedule.mechanisms) {
    spec.count *= k_scale;
    acct.Add(spec);
  }
  return acct;
}

SandwichEvaluator::SandwichEvaluator(const Schedule& schedule,
                                     const GridSettings& grid, long k_scale)
    : quad_(schedule.quad) {
  if (schedule.mechanisms.empty()) {
    throw std::invalid_argument("sandwich: schedule has no mechanisms");
  }
  std::set<MixtureDirection> dirs;
  for (const MechanismSpec& spec : schedule.mechanisms) {
    if (spec.kind != MechanismKind::kGaussian) {
      throw std::invalid_argument(
          "sandwich: grid bounds are defined for (subsampled) Gaussian "
          "mechanisms");
    }
    const DirectionPolicy policy =
        spec.sampling.has_value() ? spec.sampling->policy : DirectionPolicy::kBoth;
    switch (policy) {
      case DirectionPolicy::kBoth:
        dirs.insert(MixtureDirection::kAdd);
        dirs.insert(MixtureDirection::kRemove);
        break;
      case DirectionPolicy::kAdd:
        dirs.insert(MixtureDirection::kAdd);
        break;
      case DirectionPolicy::kRemove:
        dirs.insert(MixtureDirection::kRemove);
        break;
    }
  }
  for (MixtureDirection dir : dirs) {
    LogPhiLedger lo, hi;
    for (const MechanismSpec& spec : schedule.mechanisms) {
      SubsampledGaussianSpec sg;
      sg.sigma = spec.sigma;
      sg.gamma = spec.sampling.has_value() ? spec.sampling->gamma : 1.0;
      sg.direction = dir;
      auto g = std::make_shared<GridPld>(BuildGrid(sg, grid.S, grid.N));
      const long count = spec.count * k_scale;
      lo = lo.Append(g->Term(Side::kLo), count);
      hi = hi.Append(g->Term(Side::kHi), count);
      tail_total_ += static_cast<double>(count) * g->TailMassBound() /
                     static_cast<double>(dirs.size());
      grids_.push_back(std::move(g));
    }
    lo_ledgers_.push_back(std::move(lo));
    hi_ledgers_.push_back(std::move(hi));
  }
  // tail_total_ accumulated per direction above; directions share the same
  // k count, so normalize back to the per-composition union bound.
}

double SandwichEvaluator::DeltaSide(Side side, double eps) const {
  const auto& ledgers = side == Side::kLo ? lo_ledgers_ : hi_ledgers_;
  const double sign = side == Side::kLo ? -1.0 : 1.0;
  double best = -1.0;
  for (const LogPhiLedger& ledger : ledgers) {
    const DeltaResult r = DeltaFromLedger(ledger, eps, quad_);
    // Numeric slack: reported quadrature error plus the composed roundoff
    // floor, pushed outward per side.
    const double slack =
        r.err_estimate + kCompositionNoisePerTerm * ledger.NoiseMultiplier();
    best = std::max(best, r.delta + sign * slack);
  }
  return best;
}

ScheduleSandwich SandwichEvaluator::DeltaAtEps(double eps) const {
  ScheduleSandwich out;
  out.lo = std::max(0.0, DeltaSide(Side::kLo, eps) - tail_total_);
  out.hi = std::min(1.0, DeltaSide(Side::kHi, eps) + tail_total_);
  out.lo = std::min(out.lo, out.hi);
  return out;
}

ScheduleSandwich SandwichEvaluator::EpsAtDelta(double delta) const {
  if (delta <= 0 || delta >= 1) {
    throw std::invalid_argument("sandwich: delta in (0,1)");
  }
  const auto solve = [&](const std::function<double(double)>& curve) {
    if (curve(0.0) <= delta) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (curve(hi) > delta) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e9) {
        throw NumericalError("sandwich: bisection bracket not found", hi);
      }
    }
    while (hi - lo > 1e-8) {
      const double mid = 0.5 * (lo + hi);
      (curve(mid) > delta ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  ScheduleSandwich out;
  out.lo = solve([&](double eps) {
    return std::max(0.0, DeltaSide(Side::kLo, eps) - tail_total_);
  });
  out.hi = solve([&](double eps) {
    return std::min(1.0, DeltaSide(Side::kHi, eps) + tail_total_);
  });
  out.lo = std::min(out.lo, out.hi);
  return out;
}

std::string FormatDouble17(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace afa
