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
//
// afa: privacy accounting front end.
//
//   afa query   --schedule FILE (--eps X | --delta Y) [--sandwich] ...
//   afa sweep   --schedule FILE --k 1,10,100 --out FILE.csv [--eps|--delta]
//   afa convert --from {rdp|profile|tradeoff} --to {dp|tradeoff|phi} ...
//
// Exit codes: 0 ok, 1 input error, 2 numerical budget exceeded.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "afa/accountant.h"
#include "afa/errors.h"
#include "afa/schedule.h"

namespace {

using afa::FormatDouble17;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNumericalError = 2;

struct JsonRecord {
  std::vector<std::pair<std::string, std::string>> fields;

  void Add(const std::string& key, double value) {
    fields.emplace_back(key, FormatDouble17(value));
  }
  void AddRaw(const std::string& key, const std::string& raw) {
    fields.emplace_back(key, raw);
  }
  std::string Str() const {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << '"' << fields[i].first << "\":" << fields[i].second;
    }
    out << '}';
    return out.str();
  }
};

std::string SettingsEcho(const afa::Schedule& schedule) {
  std::ostringstream out;
  out << "{\"mechanisms\":" << schedule.mechanisms.size()
      << ",\"abs_tol\":" << FormatDouble17(schedule.quad.abs_tol)
      << ",\"max_panels\":" << schedule.quad.max_panels
      << ",\"nodes_per_panel\":" << schedule.quad.nodes_per_panel;
  if (schedule.grid.has_value()) {
    out << ",\"grid_S\":" << FormatDouble17(schedule.grid->S)
        << ",\"grid_N\":" << schedule.grid->N;
  }
  out << '}';
  return out.str();
}

struct QueryOptions {
  std::string schedule_path;
  std::optional<double> eps;
  std::optional<double> delta;
  bool sandwich = false;
  std::optional<double> abs_tol;
  std::optional<double> grid_s;
  std::optional<long> grid_n;
};

afa::Schedule LoadSchedule(const QueryOptions& opt) {
  afa::Schedule schedule = afa::ParseScheduleFile(opt.schedule_path);
  if (opt.abs_tol.has_value()) schedule.quad.abs_tol = *opt.abs_tol;
  if (opt.grid_s.has_value() || opt.grid_n.has_value()) {
    afa::GridSettings g = schedule.grid.value_or(afa::GridSettings{});
    if (opt.grid_s.has_value()) g.S = *opt.grid_s;
    if (opt.grid_n.has_value()) g.N = *opt.grid_n;
    schedule.grid = g;
  }
  if (opt.eps.has_value()) {
    schedule.query = {afa::ScheduleQuery::Kind::kDeltaAtEps, *opt.eps};
  } else if (opt.delta.has_value()) {
    schedule.query = {afa::ScheduleQuery::Kind::kEpsAtDelta, *opt.delta};
  }
  if (schedule.query.kind == afa::ScheduleQuery::Kind::kNone) {
    throw std::invalid_argument(
        "query: pass --eps or --delta (or a query block in the schedule)");
  }
  return schedule;
}

int RunQuery(const QueryOptions& opt) {
  const afa::Schedule schedule = LoadSchedule(opt);
  JsonRecord record;
  record.AddRaw("schema", "1");
  bool converged = true;

  if (opt.sandwich) {
    const afa::GridSettings grid = schedule.grid.value_or(afa::GridSettings{});
    const afa::SandwichEvaluator eval(schedule, grid);
    if (schedule.query.kind == afa::ScheduleQuery::Kind::kDeltaAtEps) {
      const afa::ScheduleSandwich s = eval.DeltaAtEps(schedule.query.value);
      record.Add("eps", schedule.query.value);
      record.Add("delta_lo", s.lo);
      record.Add("delta_hi", s.hi);
    } else {
      const afa::ScheduleSandwich s = eval.EpsAtDelta(schedule.query.value);
      record.Add("delta", schedule.query.value);
      record.Add("eps_lo", s.lo);
      record.Add("eps_hi", s.hi);
    }
    record.AddRaw("settings", SettingsEcho(schedule));
    std::cout << record.Str() << std::endl;
    return kOk;
  }

  const afa::Accountant acct = afa::BuildAccountant(schedule);
  if (schedule.query.kind == afa::ScheduleQuery::Kind::kDeltaAtEps) {
    const afa::DeltaResult result = acct.DeltaOfEps(schedule.query.value);
    converged = result.converged;
    record.Add("eps", schedule.query.value);
    record.Add("delta", result.delta);
    record.Add("err_estimate", result.err_estimate);
  } else {
    const double eps = acct.EpsOfDelta(schedule.query.value);
    record.Add("delta", schedule.query.value);
    record.Add("eps", eps);
    record.Add("err_estimate", 1e-8);  // bisection tolerance
  }
  record.Add("inf_mass", acct.InfMassFloor());
  record.AddRaw("settings", SettingsEcho(schedule));
  std::cout << record.Str() << std::endl;
  return converged ? kOk : kNumericalError;
}

std::vector<afa::WeightedRdpCurve> RdpCurvesFor(const afa::Schedule& schedule,
                                                long k_scale) {
  std::vector<afa::WeightedRdpCurve> curves;
  for (const afa::MechanismSpec& spec : schedule.mechanisms) {
    afa::WeightedRdpCurve w{afa::RdpCurve::Gaussian(1.0), spec.count * k_scale};
    switch (spec.kind) {
      case afa::MechanismKind::kGaussian:
        if (spec.sampling.has_value() && spec.sampling->gamma < 1.0) {
          // The remove-direction mixture pair is the moments-accountant
          // convention for Poisson subsampling.
          w.curve = afa::RdpCurve::SubsampledGaussian(
              spec.sigma, spec.sampling->gamma, afa::MixtureDirection::kRemove);
        } else {
          w.curve = afa::RdpCurve::Gaussian(spec.sigma);
        }
        break;
      case afa::MechanismKind::kLaplace: {
        const double lambda = spec.lambda;
        w.curve = afa::RdpCurve::Numeric(
            [lambda](double o) { return -std::abs(o) / lambda - std::log(2 * lambda); },
            [lambda](double o) {
              return -std::abs(o - 1.0) / lambda - std::log(2 * lambda);
            });
        break;
      }
      case afa::MechanismKind::kRandomizedResponse:
        w.curve = afa::RdpCurve::Discrete(afa::RrPair(spec.p));
        break;
      case afa::MechanismKind::kDiscrete:
        w.curve = afa::RdpCurve::Discrete(*spec.pair);
        break;
    }
    curves.push_back(std::move(w));
  }
  return curves;
}

bool HomogeneousGaussian(const afa::Schedule& schedule) {
  for (const afa::MechanismSpec& spec : schedule.mechanisms) {
    if (spec.kind != afa::MechanismKind::kGaussian) return false;
    if (spec.sampling.has_value() && spec.sampling->gamma < 1.0) return false;
  }
  return !schedule.mechanisms.empty();
}

struct SweepOptions {
  std::string schedule_path;
  std::string k_spec;
  std::string out_path;
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<double> abs_tol;
};

int RunSweep(const SweepOptions& opt) {
  QueryOptions qopt;
  qopt.schedule_path = opt.schedule_path;
  qopt.eps = opt.eps;
  qopt.delta = opt.delta;
  qopt.abs_tol = opt.abs_tol;
  const afa::Schedule schedule = LoadSchedule(qopt);
  const bool eps_query =
      schedule.query.kind == afa::ScheduleQuery::Kind::kDeltaAtEps;

  std::vector<long> ks;
  {
    std::istringstream in(opt.k_spec);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      if (tok.empty()) continue;
      ks.push_back(std::stol(tok));
      if (ks.back() < 1) throw std::invalid_argument("sweep: k values >= 1");
      if (ks.size() >= 2 && ks[ks.size() - 2] >= ks.back()) {
        throw std::invalid_argument("sweep: k list must be increasing");
      }
    }
    if (ks.empty()) throw std::invalid_argument("sweep: empty k list");
  }

  std::ofstream out(opt.out_path);
  if (!out) {
    throw std::invalid_argument("sweep: cannot open output '" + opt.out_path +
                                "'");
  }
  out << "k,method,value,err\n";
  const auto emit = [&out](long k, const std::string& method, double value,
                           double err) {
    out << k << ',' << method << ',' << FormatDouble17(value) << ','
        << FormatDouble17(err) << '\n';
  };
  // A method that cannot run for this schedule gets value NaN and a nonzero
  // code in the err column.
  const auto emit_failure = [&emit](long k, const std::string& method,
                                    int code) {
    emit(k, method, std::nan(""), code);
  };

  const bool gridable = [&] {
    for (const afa::MechanismSpec& spec : schedule.mechanisms) {
      if (spec.kind != afa::MechanismKind::kGaussian) return false;
    }
    return schedule.grid.has_value();
  }();

  for (long k : ks) {
    // afa
    try {
      const afa::Accountant acct = afa::BuildAccountant(schedule, k);
      if (eps_query) {
        const afa::DeltaResult r = acct.DeltaOfEps(schedule.query.value);
        emit(k, "afa", r.delta, r.err_estimate);
      } else {
        emit(k, "afa", acct.EpsOfDelta(schedule.query.value), 1e-8);
      }
    } catch (const afa::NumericalError&) {
      emit_failure(k, "afa", kNumericalError);
    }
    // afa_lo / afa_hi (grid sandwich)
    if (gridable) {
      try {
        const afa::SandwichEvaluator eval(schedule, *schedule.grid, k);
        const afa::ScheduleSandwich s =
            eps_query ? eval.DeltaAtEps(schedule.query.value)
                      : eval.EpsAtDelta(schedule.query.value);
        emit(k, "afa_lo", s.lo, 0.0);
        emit(k, "afa_hi", s.hi, 0.0);
      } catch (const afa::NumericalError&) {
        emit_failure(k, "afa_lo", kNumericalError);
        emit_failure(k, "afa_hi", kNumericalError);
      }
    } else {
      emit_failure(k, "afa_lo", kInputError);
      emit_failure(k, "afa_hi", kInputError);
    }
    // rdp_classical and rdp_optconv
    try {
      const auto curves = RdpCurvesFor(schedule, k);
      if (eps_query) {
        emit_failure(k, "rdp_classical", kInputError);  // eps->delta: use afa
        const afa::TradeoffFn f = afa::RdpToTradeoff(curves);
        emit(k, "rdp_optconv", afa::TradeoffDeltaAtEps(f, schedule.query.value),
             0.0);
      } else {
        emit(k, "rdp_classical",
             afa::RdpComposeConvertClassical(curves, schedule.query.value), 0.0);
        const afa::TradeoffFn f = afa::RdpToTradeoff(curves);
        emit(k, "rdp_optconv", afa::TradeoffEpsAtDelta(f, schedule.query.value),
             0.0);
      }
    } catch (const afa::NumericalError&) {
      emit_failure(k, "rdp_classical", kNumericalError);
      emit_failure(k, "rdp_optconv", kNumericalError);
    }
    // oracle (analytic Gaussian)
    if (HomogeneousGaussian(schedule)) {
      double mu_sq = 0.0;
      for (const afa::MechanismSpec& spec : schedule.mechanisms) {
        mu_sq += static_cast<double>(spec.count) * static_cast<double>(k) /
                 (spec.sigma * spec.sigma);
      }
      const double mu = std::sqrt(mu_sq);
      if (eps_query) {
        emit(k, "oracle", afa::AnalyticGaussianDelta(mu, schedule.query.value),
             0.0);
      } else {
        emit(k, "oracle", afa::AnalyticGaussianEps(mu, schedule.query.value),
             0.0);
      }
    } else {
      emit_failure(k, "oracle", kInputError);
    }
  }
  return kOk;
}

struct ConvertOptions {
  std::string from, to;
  std::string mech = "gaussian";
  double sigma = 1.0;
  double p = 0.75;
  long k = 1;
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<double> type1;
  std::optional<double> t;
  std::string route = "classical";
};

afa::TradeoffFn MechTradeoff(const ConvertOptions& opt) {
  if (opt.mech == "gaussian") {
    return afa::GaussianTradeoff(opt.sigma, static_cast<int>(opt.k));
  }
  if (opt.mech == "rr") return afa::RrTradeoff(opt.p);
  throw std::invalid_argument("convert: --mech must be gaussian or rr");
}

afa::PrivacyProfile MechProfile(const ConvertOptions& opt) {
  if (opt.mech == "gaussian") {
    return afa::GaussianProfile(opt.sigma, static_cast<int>(opt.k));
  }
  if (opt.mech == "rr") return afa::RrProfile(opt.p);
  throw std::invalid_argument("convert: --mech must be gaussian or rr");
}

int RunConvert(const ConvertOptions& opt) {
  JsonRecord record;
  record.AddRaw("schema", "1");
  if (opt.from == "rdp") {
    std::vector<afa::WeightedRdpCurve> curves{
        {afa::RdpCurve::Gaussian(opt.sigma), opt.k}};
    if (opt.to == "dp") {
      if (opt.delta.has_value()) {
        const double eps =
            opt.route == "optimal"
                ? afa::TradeoffEpsAtDelta(afa::RdpToTradeoff(curves), *opt.delta)
                : afa::RdpComposeConvertClassical(curves, *opt.delta);
        record.Add("delta", *opt.delta);
        record.Add("eps", eps);
      } else if (opt.eps.has_value() && opt.route == "optimal") {
        record.Add("eps", *opt.eps);
        record.Add("delta",
                   afa::TradeoffDeltaAtEps(afa::RdpToTradeoff(curves), *opt.eps));
      } else {
        throw std::invalid_argument(
            "convert rdp->dp: pass --delta (or --eps with --route optimal)");
      }
    } else if (opt.to == "tradeoff") {
      if (!opt.type1.has_value()) {
        throw std::invalid_argument("convert rdp->tradeoff: pass --type1");
      }
      record.Add("type1", *opt.type1);
      record.Add("type2", afa::RdpToTradeoff(curves, *opt.type1));
    } else {
      throw std::invalid_argument("convert rdp->: --to must be dp or tradeoff");
    }
  } else if (opt.from == "profile") {
    const afa::PrivacyProfile profile = MechProfile(opt);
    if (opt.to == "dp") {
      if (opt.eps.has_value()) {
        record.Add("eps", *opt.eps);
        record.Add("delta", profile(std::exp(*opt.eps)));
      } else if (opt.delta.has_value()) {
        double lo = 0.0, hi = 1.0;
        if (profile(1.0) <= *opt.delta) {
          record.Add("delta", *opt.delta);
          record.Add("eps", 0.0);
        } else {
          while (profile(std::exp(hi)) > *opt.delta) hi *= 2.0;
          while (hi - lo > 1e-9) {
            const double mid = 0.5 * (lo + hi);
            (profile(std::exp(mid)) > *opt.delta ? lo : hi) = mid;
          }
          record.Add("delta", *opt.delta);
          record.Add("eps", 0.5 * (lo + hi));
        }
      } else {
        throw std::invalid_argument("convert profile->dp: pass --eps or --delta");
      }
    } else if (opt.to == "tradeoff") {
      if (!opt.type1.has_value()) {
        throw std::invalid_argument("convert profile->tradeoff: pass --type1");
      }
      record.Add("type1", *opt.type1);
      record.Add("type2", afa::TradeoffFromProfile(profile, *opt.type1));
    } else {
      throw std::invalid_argument(
          "convert profile->: --to must be dp or tradeoff");
    }
  } else if (opt.from == "tradeoff") {
    const afa::TradeoffFn f = MechTradeoff(opt);
    if (opt.to == "dp") {
      if (opt.delta.has_value()) {
        record.Add("delta", *opt.delta);
        record.Add("eps", afa::TradeoffEpsAtDelta(f, *opt.delta));
      } else if (opt.eps.has_value()) {
        record.Add("eps", *opt.eps);
        record.Add("delta", afa::TradeoffDeltaAtEps(f, *opt.eps));
      } else {
        throw std::invalid_argument("convert tradeoff->dp: pass --eps or --delta");
      }
    } else if (opt.to == "phi") {
      if (!opt.t.has_value()) {
        throw std::invalid_argument("convert tradeoff->phi: pass --t");
      }
      const afa::PhiPair phi = afa::PhiFromTradeoff(f, *opt.t);
      record.Add("t", *opt.t);
      record.Add("phi_re", phi.phi.real());
      record.Add("phi_im", phi.phi.imag());
      record.Add("phi_prime_re", phi.phi_prime.real());
      record.Add("phi_prime_im", phi.phi_prime.imag());
    } else {
      throw std::invalid_argument("convert tradeoff->: --to must be dp or phi");
    }
  } else {
    throw std::invalid_argument(
        "convert: --from must be rdp, profile, or tradeoff");
  }
  std::cout << record.Str() << std::endl;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analytical Fourier privacy accountant"};
  app.require_subcommand(1);

  QueryOptions qopt;
  CLI::App* query = app.add_subcommand("query", "Answer one accounting query");
  query->add_option("--schedule", qopt.schedule_path, "Schedule JSON file")
      ->required();
  double qeps = 0, qdelta = 0, qtol = 0, qs = 0;
  long qn = 0;
  CLI::Option* oeps = query->add_option("--eps", qeps, "Query delta(eps)");
  CLI::Option* odelta = query->add_option("--delta", qdelta, "Query eps(delta)");
  oeps->excludes(odelta);
  query->add_flag("--sandwich", qopt.sandwich,
                  "Grid-certified lower/upper bounds");
  CLI::Option* otol = query->add_option("--abs-tol", qtol, "Quadrature abs tol");
  CLI::Option* os = query->add_option("--grid-S", qs, "Grid half-width");
  CLI::Option* on = query->add_option("--grid-N", qn, "Grid point count");

  SweepOptions sopt;
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep composition counts");
  sweep->add_option("--schedule", sopt.schedule_path, "Schedule JSON file")
      ->required();
  sweep->add_option("--k", sopt.k_spec, "Comma-separated increasing k list")
      ->required();
  sweep->add_option("--out", sopt.out_path, "Output CSV path")->required();
  double seps = 0, sdelta = 0, stol = 0;
  CLI::Option* soeps = sweep->add_option("--eps", seps, "Query delta(eps)");
  CLI::Option* sodelta = sweep->add_option("--delta", sdelta, "Query eps(delta)");
  soeps->excludes(sodelta);
  CLI::Option* sotol = sweep->add_option("--abs-tol", stol, "Quadrature abs tol");

  ConvertOptions copt;
  CLI::App* convert = app.add_subcommand("convert", "Representation conversions");
  convert->add_option("--from", copt.from, "rdp|profile|tradeoff")->required();
  convert->add_option("--to", copt.to, "dp|tradeoff|phi")->required();
  convert->add_option("--mech", copt.mech, "gaussian|rr");
  convert->add_option("--sigma", copt.sigma, "Gaussian sigma");
  convert->add_option("--p", copt.p, "Randomized-response p");
  convert->add_option("--k", copt.k, "Composition count");
  double ceps = 0, cdelta = 0, ctype1 = 0, ct = 0;
  CLI::Option* coeps = convert->add_option("--eps", ceps);
  CLI::Option* codelta = convert->add_option("--delta", cdelta);
  CLI::Option* cotype1 = convert->add_option("--type1", ctype1);
  CLI::Option* cot = convert->add_option("--t", ct);
  convert->add_option("--route", copt.route, "classical|optimal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (query->parsed()) {
      if (oeps->count()) qopt.eps = qeps;
      if (odelta->count()) qopt.delta = qdelta;
      if (otol->count()) qopt.abs_tol = qtol;
      if (os->count()) qopt.grid_s = qs;
      if (on->count()) qopt.grid_n = qn;
      return RunQuery(qopt);
    }
    if (sweep->parsed()) {
      if (soeps->count()) sopt.eps = seps;
      if (sodelta->count()) sopt.delta = sdelta;
      if (sotol->count()) sopt.abs_tol = stol;
      return RunSweep(sopt);
    }
    if (convert->parsed()) {
      if (coeps->count()) copt.eps = ceps;
      if (codelta->count()) copt.delta = cdelta;
      if (cotype1->count()) copt.type1 = ctype1;
      if (cot->count()) copt.t = ct;
      return RunConvert(copt);
    }
  } catch (const afa::NumericalError& e) {
    std::cerr << "numerical budget exceeded: " << e.what() << std::endl;
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << std::endl;
    return kInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << std::endl;
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kNumericalError;
  }
  return kInputError;
}
