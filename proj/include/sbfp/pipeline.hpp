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

// End-to-end turning-point pipeline: fit, feasibility, h* in both modes,
// restricted moments at h*, the payoff game and its equilibrium, collected
// into a JSON report.

#ifndef SBFP_PIPELINE_HPP_
#define SBFP_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sbfp/functional.hpp"
#include "sbfp/game.hpp"
#include "sbfp/hstar.hpp"
#include "sbfp/process.hpp"
#include "sbfp/series.hpp"

namespace sbfp::pipeline {

inline constexpr std::string_view kToolVersion = "1.0.0";

struct PredictConfig {
  std::size_t window = kDefaultWindow;
  TimeUnit time_unit = TimeUnit::kObservation;
  double a0 = 0.0;                    // direct-mode initial position
  std::optional<double> delta0_mean;  // direct mode; defaults to delta_hat
  double paper_tol = hstar::kPaperTolerance;
  double direct_tol = hstar::kDirectTolerance;
  double cost = 0.0;
  bool zero_sum = false;
  game::PayoffOverrides overrides;
  std::optional<game::Game2x2> payoff;  // replaces the builder entirely
  std::uint64_t seed = 1;
  std::size_t mc_reps = 0;            // 0 skips the simulation stage
  std::size_t max_steps = process::kDefaultMaxSteps;
  unsigned threads = 0;               // not echoed; output is thread-independent
};

// A pipeline stage: status is "ok", "skipped" or "failed". A failed solver
// stage still carries its result for diagnostics.
template <class T>
struct Stage {
  std::string status = "skipped";
  std::string reason;
  std::optional<T> value;

  bool ok() const { return status == "ok"; }
};

struct Report {
  std::string version{kToolVersion};
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  FitResult fit;
  hstar::Feasibility feasibility;
  Stage<hstar::HstarResult> hstar_paper;
  Stage<hstar::HstarResult> hstar_direct;
  Stage<transform::RestrictedMoments> moments;
  Stage<game::Game2x2> game;
  Stage<game::MixedEquilibrium> equilibrium;
  Stage<process::McSummary> mc;
  std::string h_star_source = "none";  // "paper", "direct" or "none"
  double h_star = 0.0;
  std::vector<std::string> notes;
};

// Problem handed to both solvers for a fit and config.
hstar::HstarProblem ProblemFromFit(const FitResult& fit, const PredictConfig& config);

Report Predict(const SeriesData& series, const PredictConfig& config);

nlohmann::json ConfigToJson(const PredictConfig& config);

nlohmann::json ToJson(const FitResult& fit);
nlohmann::json ToJson(const hstar::Feasibility& f);
nlohmann::json ToJson(const hstar::HstarResult& r);
nlohmann::json ToJson(const transform::RestrictedMoments& m);
nlohmann::json ToJson(const process::McSummary& s);
nlohmann::json ToJson(const Report& report);

FitResult FitFromJson(const nlohmann::json& j);
hstar::Feasibility FeasibilityFromJson(const nlohmann::json& j);
hstar::HstarResult HstarFromJson(const nlohmann::json& j);
transform::RestrictedMoments MomentsFromJson(const nlohmann::json& j);
game::MixedEquilibrium EquilibriumFromJson(const nlohmann::json& j);
process::McSummary McSummaryFromJson(const nlohmann::json& j);
Report ReportFromJson(const nlohmann::json& j);

// Two-space indented JSON with a trailing newline.
std::string Serialize(const nlohmann::json& j);

}  // namespace sbfp::pipeline

#endif  // SBFP_PIPELINE_HPP_
