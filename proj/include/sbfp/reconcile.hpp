// Copyright 2026 The SBFP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Analytic-versus-simulation check of the functional Phi(u, 0, 0, 0; h).
// Three readings of the event behind the functional are estimated by Monte
// Carlo on the same replications:
//   (a) E[exp(-u A_{nu-1}); tau_{nu-1} <= h < tau_nu]
//   (b) E[exp(-u A_{nu-1}); tau_nu > h]
//   (c) E[exp(-u A_{nu-1}); exit]
// and the closest one is reported per grid point.

#ifndef SBFP_RECONCILE_HPP_
#define SBFP_RECONCILE_HPP_

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "sbfp/lst.hpp"
#include "sbfp/process.hpp"

namespace sbfp::pipeline {

inline constexpr double kForcedLimitTolerance = 1e-3;
inline constexpr double kSmallHorizon = 1e-4;  // in units of delta_mean
inline constexpr double kLargeHorizon = 50.0;  // in units of delta_mean

struct CandidateEstimate {
  std::string event;  // "a", "b" or "c"
  double mc_mean = 0.0;
  double mc_se = 0.0;
  double abs_deviation = 0.0;
  double rel_deviation = 0.0;  // |deviation| / |analytic|, inf when analytic is 0
  double z_score = 0.0;        // |deviation| / se, inf when se is 0
};

struct ReconcileRow {
  double u = 0.0;
  double h = 0.0;
  double analytic = 0.0;
  std::array<CandidateEstimate, 3> candidates;
  std::string best_match;
};

struct ForcedLimit {
  double h = 0.0;
  double expected = 0.0;
  double analytic = 0.0;
  bool pass = false;
};

struct ReconcileReport {
  transform::LstParams lst;
  std::size_t reps = 0;
  std::size_t exits = 0;
  double truncation_rate = 0.0;
  std::vector<ReconcileRow> rows;
  std::array<ForcedLimit, 2> forced_limits;

  bool limits_hold() const { return forced_limits[0].pass && forced_limits[1].pass; }
};

struct ReconcileOptions {
  std::vector<double> u_grid;
  std::vector<double> h_grid;
  process::McConfig mc;
  std::size_t schedule_k = 2;  // schedule prefix used for the analytic slopes
};

// Requires a memoryless observation model with a positive initial delay.
ReconcileReport Reconcile(const process::ProcessParams& params,
                          const process::ObservationModel& obs,
                          const ReconcileOptions& options);

nlohmann::json ToJson(const ReconcileReport& report);

}  // namespace sbfp::pipeline

#endif  // SBFP_RECONCILE_HPP_
