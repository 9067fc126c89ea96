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
#ifndef AFA_SCHEDULE_H_
#define AFA_SCHEDULE_H_

#include <optional>
#include <string>
#include <vector>

#include "afa/accountant.h"
#include "afa/grid_pld.h"

// Mechanism schedule files (JSON) and the query plumbing behind the CLI.

namespace afa {

struct GridSettings {
  double S = 100.0;
  long N = 100000;
};

struct ScheduleQuery {
  enum class Kind { kNone, kDeltaAtEps, kEpsAtDelta };
  Kind kind = Kind::kNone;
  double value = 0.0;
};

struct Schedule {
  std::vector<MechanismSpec> mechanisms;
  ScheduleQuery query;
  QuadConfig quad;
  std::optional<GridSettings> grid;
};

Schedule ParseScheduleJson(const std::string& text);
Schedule ParseScheduleFile(const std::string& path);

// Builds the accountant with every mechanism count scaled by `k_scale`.
Accountant BuildAccountant(const Schedule& schedule, long k_scale = 1);

// Grid-sandwich evaluation of the schedule (mechanisms must be Gaussian,
// subsampled or not). Directions follow the sampling policies; the bracket
// is the pointwise max over directions.
struct ScheduleSandwich {
  double lo = 0.0;
  double hi = 0.0;
};
class SandwichEvaluator {
 public:
  SandwichEvaluator(const Schedule& schedule, const GridSettings& grid,
                    long k_scale = 1);
  ScheduleSandwich DeltaAtEps(double eps) const;
  // eps solved on the lo and hi curves separately (lo <= hi).
  ScheduleSandwich EpsAtDelta(double delta) const;

 private:
  double DeltaSide(Side side, double eps) const;

  QuadConfig quad_;
  std::vector<LogPhiLedger> lo_ledgers_;  // one per direction in play
  std::vector<LogPhiLedger> hi_ledgers_;
  std::vector<std::shared_ptr<GridPld>> grids_;
  double tail_total_ = 0.0;
};

// Fixed-width float formatting used for all CLI output (17 significant
// digits, round-trip exact).
std::string FormatDouble17(double v);

}  // namespace afa

#endif  // AFA_SCHEDULE_H_
