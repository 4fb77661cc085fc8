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

#include "sbfp/pipeline.hpp"

#include <cmath>
#include <limits>

#include "sbfp/error.hpp"

namespace sbfp::pipeline {
namespace {

using nlohmann::json;

// Non-finite doubles are written as null and read back as NaN or +inf.
json Number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double ReadNumber(const json& j, const char* key,
                  double missing = std::numeric_limits<double>::quiet_NaN()) {
  const auto& v = j.at(key);
  return v.is_null() ? missing : v.get<double>();
}

json EstimateJson(const process::Estimate& e) { return {{"mean", Number(e.mean)}, {"se", Number(e.se)}}; }

process::Estimate EstimateFromJson(const json& j) {
  return {ReadNumber(j, "mean"), ReadNumber(j, "se")};
}

hstar::Status StatusFromName(const std::string& name) {
  for (auto s : {hstar::Status::kSuccess, hstar::Status::kNoRootInBracket,
                 hstar::Status::kNoStationaryPoint, hstar::Status::kToleranceNotMet}) {
    if (hstar::StatusName(s) == name) return s;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown solver status " + name);
}

hstar::Extremum ExtremumFromName(const std::string& name) {
  for (auto e : {hstar::Extremum::kNone, hstar::Extremum::kMaximum, hstar::Extremum::kMinimum,
                 hstar::Extremum::kFlat}) {
    if (hstar::ExtremumName(e) == name) return e;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown extremum " + name);
}

game::EquilibriumKind KindFromName(const std::string& name) {
  for (auto k : {game::EquilibriumKind::kInterior, game::EquilibriumKind::kPureStrategy,
                 game::EquilibriumKind::kContinuum}) {
    if (game::EquilibriumKindName(k) == name) return k;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown equilibrium kind " + name);
}

json OverridesJson(const std::array<std::array<std::optional<double>, 2>, 2>& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v ? json(*v) : json(nullptr));
    out.push_back(r);
  }
  return out;
}

template <class T, class Fn>
json StageJson(const Stage<T>& stage, Fn&& to_json) {
  json j = stage.value ? to_json(*stage.value) : json::object();
  j["status"] = stage.status;
  if (!stage.reason.empty()) j["reason"] = stage.reason;
  return j;
}

template <class T, class Fn>
Stage<T> StageFromJson(const json& j, Fn&& from_json) {
  Stage<T> stage;
  stage.status = j.at("status").get<std::string>();
  if (j.contains("reason")) stage.reason = j.at("reason").get<std::string>();
  std::size_t payload = j.size() - 1 - (j.contains("reason") ? 1 : 0);
  if (payload > 0) stage.value = from_json(j);
  return stage;
}

template <class T>
void MarkOk(Stage<T>& stage, T value) {
  stage.status = "ok";
  stage.reason.clear();
  stage.value = std::move(value);
}

template <class T>
void MarkFailed(Stage<T>& stage, std::string reason, std::optional<T> value = std::nullopt) {
  stage.status = "failed";
  stage.reason = std::move(reason);
  stage.value = std::move(value);
}

template <class T>
void MarkSkipped(Stage<T>& stage, std::string reason) {
  stage.status = "skipped";
  stage.reason = std::move(reason);
  stage.value.reset();
}

void RecordSolve(Stage<hstar::HstarResult>& stage, const hstar::HstarResult& r) {
  if (r.ok()) {
    MarkOk(stage, r);
  } else {
    MarkFailed(stage, std::string(hstar::StatusName(r.status)), std::optional(r));
  }
}

}  // namespace

hstar::HstarProblem ProblemFromFit(const FitResult& fit, const PredictConfig& config) {
  hstar::HstarProblem p;
  p.delta_mean = fit.delta_hat;
  p.w_bar = fit.w_bar_hat;
  p.w_prev = fit.w_prev_hat;
  p.a0 = config.a0;
  p.delta0_mean = config.delta0_mean;
  return p;
}

Report Predict(const SeriesData& series, const PredictConfig& config) {
  Report report;
  report.seed = config.seed;
  report.config = ConfigToJson(config);
  report.fit = FitParams(series, config.window, config.time_unit);
  const FitResult& fit = report.fit;
  report.notes.push_back("drift schedule estimated from non-overlapping windows of " +
                         std::to_string(config.window) + " observations");

  const hstar::HstarProblem problem = ProblemFromFit(fit, config);
  report.feasibility = hstar::CheckFeasibility(problem);
  transform::LstParams lst = problem.ToLstParams();
  lst.sigma = fit.sigma_hat;

  if (!report.feasibility.feasible) {
    MarkSkipped(report.hstar_paper, "infeasible: w_prev_hat outside the feasibility bounds");
  } else {
    try {
      RecordSolve(report.hstar_paper, hstar::SolvePaper(problem, config.paper_tol));
    } catch (const Error& e) {
      MarkFailed(report.hstar_paper, e.what());
    }
  }
  try {
    RecordSolve(report.hstar_direct, hstar::SolveDirect(problem, lst, config.direct_tol));
  } catch (const Error& e) {
    MarkFailed(report.hstar_direct, e.what());
  }

  if (report.hstar_paper.ok()) {
    report.h_star_source = "paper";
    report.h_star = report.hstar_paper.value->h_star;
  } else if (report.hstar_direct.ok()) {
    report.h_star_source = "direct";
    report.h_star = report.hstar_direct.value->h_star;
    report.notes.push_back("paper mode unavailable (" + report.hstar_paper.reason +
                           "); direct-mode h* drives the later stages");
  }

  if (report.h_star_source == "none") {
    MarkSkipped(report.moments, "no h* available");
  } else {
    try {
      MarkOk(report.moments, transform::ComputeRestrictedMoments(lst, report.h_star));
    } catch (const Error& e) {
      MarkFailed(report.moments, e.what());
    }
  }

  if (config.payoff) {
    MarkOk(report.game, *config.payoff);
    report.notes.push_back("payoff matrix supplied by the caller");
  } else if (report.moments.ok()) {
    const auto& m = *report.moments.value;
    MarkOk(report.game, game::PayoffFromAnalytics(m.a_prev, m.a_exit,
                                                  fit.w_bar_hat * fit.delta_hat, config.cost,
                                                  config.overrides, config.zero_sum));
  } else {
    MarkSkipped(report.game, "moments unavailable");
  }

  if (report.game.ok()) {
    MarkOk(report.equilibrium, game::SolveMixed(*report.game.value));
  } else {
    MarkSkipped(report.equilibrium, "game unavailable");
  }

  if (config.mc_reps == 0) {
    MarkSkipped(report.mc, "mc_reps is 0");
  } else {
    try {
      process::ProcessParams params;
      params.sigma = fit.sigma_hat;
      params.a0 = config.a0;
      std::vector<double> drifts;
      for (const DriftWindow& w : fit.drift_windows) drifts.push_back(w.drift);
      params.drift = process::DriftSchedule(drifts);
      const auto obs = process::ObservationModel::Memoryless(lst.delta_mean, lst.delta0_mean);
      process::McConfig mc{config.mc_reps, config.seed, config.max_steps, config.threads};
      MarkOk(report.mc, process::McEstimate(params, obs, {}, mc));
    } catch (const Error& e) {
      MarkFailed(report.mc, e.what());
    }
  }
  return report;
}

json ConfigToJson(const PredictConfig& c) {
  return {{"window", c.window},
          {"time_unit", TimeUnitName(c.time_unit)},
          {"a0", c.a0},
          {"delta0_mean", c.delta0_mean ? json(*c.delta0_mean) : json(nullptr)},
          {"paper_tol", c.paper_tol},
          {"direct_tol", c.direct_tol},
          {"cost", c.cost},
          {"zero_sum", c.zero_sum},
          {"overrides",
           {{"payoff1", OverridesJson(c.overrides.payoff1)},
            {"payoff2", OverridesJson(c.overrides.payoff2)}}},
          {"payoff", c.payoff ? game::GameToJson(*c.payoff) : json(nullptr)},
          {"seed", c.seed},
          {"mc_reps", c.mc_reps},
          {"max_steps", c.max_steps}};
}

json ToJson(const FitResult& fit) {
  json windows = json::array();
  for (const DriftWindow& w : fit.drift_windows) {
    windows.push_back({{"start", w.start}, {"end", w.end}, {"drift", w.drift}});
  }
  return {{"sigma_hat", fit.sigma_hat},   {"drift_windows", windows},
          {"w_bar_hat", fit.w_bar_hat},   {"w_bar_se", fit.w_bar_se},
          {"w_prev_hat", fit.w_prev_hat}, {"delta_hat", fit.delta_hat},
          {"a0", fit.a0},                 {"window", fit.window},
          {"points", fit.points},         {"time_unit", TimeUnitName(fit.time_unit)}};
}

json ToJson(const hstar::Feasibility& f) {
  return {{"feasible", f.feasible}, {"lower", f.lower}, {"upper", f.upper}};
}

json ToJson(const hstar::HstarResult& r) {
  json constants = nullptr;
  if (r.constants) {
    constants = {{"U", r.constants->u_const}, {"V", r.constants->v_const}, {"A", r.constants->a_const}};
  }
  return {{"solver_status", hstar::StatusName(r.status)},
          {"mode", r.mode == hstar::Mode::kPaper ? "paper" : "direct"},
          {"h_star", r.h_star},
          {"residual", Number(r.residual)},
          {"bracket", {r.bracket_lo, r.bracket_hi}},
          {"feasible", r.feasible},
          {"extremum", hstar::ExtremumName(r.extremum)},
          {"constants", constants},
          {"diagnostics",
           {{"grid_points", r.diagnostics.grid_points},
            {"sign_changes", r.diagnostics.sign_changes},
            {"roots", r.diagnostics.roots},
            {"min_abs", Number(r.diagnostics.min_abs)},
            {"argmin", r.diagnostics.argmin},
            {"scale", Number(r.diagnostics.scale)}}}};
}

json ToJson(const transform::RestrictedMoments& m) {
  return {{"h", m.h},
          {"a_prev", Number(m.a_prev)},
          {"a_prev_fd", Number(m.a_prev_fd)},
          {"tau_prev", Number(m.tau_prev)},
          {"a_exit", Number(m.a_exit)},
          {"tau_exit", Number(m.tau_exit)},
          {"nu", Number(m.nu)}};
}

json ToJson(const process::McSummary& s) {
  return {{"reps", s.reps},
          {"exits", s.exits},
          {"truncation_rate", s.truncation_rate},
          {"a_prev", EstimateJson(s.a_prev)},
          {"tau_prev", EstimateJson(s.tau_prev)},
          {"a_exit", EstimateJson(s.a_exit)},
          {"tau_exit", EstimateJson(s.tau_exit)},
          {"nu", EstimateJson(s.nu)},
          {"nu_from_tau", EstimateJson(s.nu_from_tau)},
          {"functional", EstimateJson(s.functional)},
          {"args",
           {{"u", s.args.u}, {"v", s.args.v}, {"vartheta", s.args.vartheta}, {"theta", s.args.theta}}}};
}

json ToJson(const Report& r) {
  const auto hstar_json = [](const hstar::HstarResult& h) { return ToJson(h); };
  return {{"version", r.version},
          {"seed", r.seed},
          {"config", r.config},
          {"fit", ToJson(r.fit)},
          {"feasibility", ToJson(r.feasibility)},
          {"hstar_paper", StageJson(r.hstar_paper, hstar_json)},
          {"hstar_direct", StageJson(r.hstar_direct, hstar_json)},
          {"moments", StageJson(r.moments, [](const auto& m) { return ToJson(m); })},
          {"game", StageJson(r.game, game::GameToJson)},
          {"equilibrium", StageJson(r.equilibrium, game::EquilibriumToJson)},
          {"mc", StageJson(r.mc, [](const auto& s) { return ToJson(s); })},
          {"diagnostics",
           {{"h_star_source", r.h_star_source}, {"h_star", r.h_star}, {"notes", r.notes}}}};
}

FitResult FitFromJson(const json& j) {
  FitResult fit;
  fit.sigma_hat = j.at("sigma_hat").get<double>();
  for (const auto& w : j.at("drift_windows")) {
    fit.drift_windows.push_back(
        {w.at("start").get<double>(), w.at("end").get<double>(), w.at("drift").get<double>()});
  }
  fit.w_bar_hat = j.at("w_bar_hat").get<double>();
  fit.w_bar_se = j.at("w_bar_se").get<double>();
  fit.w_prev_hat = j.at("w_prev_hat").get<double>();
  fit.delta_hat = j.at("delta_hat").get<double>();
  fit.a0 = j.at("a0").get<double>();
  fit.window = j.at("window").get<std::size_t>();
  fit.points = j.at("points").get<std::size_t>();
  fit.time_unit = ParseTimeUnit(j.at("time_unit").get<std::string>());
  return fit;
}

hstar::Feasibility FeasibilityFromJson(const json& j) {
  return {j.at("feasible").get<bool>(), j.at("lower").get<double>(), j.at("upper").get<double>()};
}

hstar::HstarResult HstarFromJson(const json& j) {
  hstar::HstarResult r;
  r.status = StatusFromName(j.at("solver_status").get<std::string>());
  r.mode = j.at("mode").get<std::string>() == "paper" ? hstar::Mode::kPaper : hstar::Mode::kDirect;
  r.h_star = j.at("h_star").get<double>();
  r.residual = ReadNumber(j, "residual");
  r.bracket_lo = j.at("bracket").at(0).get<double>();
  r.bracket_hi = j.at("bracket").at(1).get<double>();
  r.feasible = j.at("feasible").get<bool>();
  r.extremum = ExtremumFromName(j.at("extremum").get<std::string>());
  if (!j.at("constants").is_null()) {
    const auto& c = j.at("constants");
    r.constants = hstar::UvaConstants{c.at("U").get<double>(), c.at("V").get<double>(),
                                      c.at("A").get<double>()};
  }
  const auto& d = j.at("diagnostics");
  r.diagnostics.grid_points = d.at("grid_points").get<std::size_t>();
  r.diagnostics.sign_changes = d.at("sign_changes").get<std::size_t>();
  r.diagnostics.roots = d.at("roots").get<std::vector<double>>();
  r.diagnostics.min_abs = ReadNumber(d, "min_abs", std::numeric_limits<double>::infinity());
  r.diagnostics.argmin = d.at("argmin").get<double>();
  r.diagnostics.scale = ReadNumber(d, "scale");
  return r;
}

transform::RestrictedMoments MomentsFromJson(const json& j) {
  transform::RestrictedMoments m;
  m.h = j.at("h").get<double>();
  m.a_prev = ReadNumber(j, "a_prev");
  m.a_prev_fd = ReadNumber(j, "a_prev_fd");
  m.tau_prev = ReadNumber(j, "tau_prev");
  m.a_exit = ReadNumber(j, "a_exit");
  m.tau_exit = ReadNumber(j, "tau_exit");
  m.nu = ReadNumber(j, "nu");
  return m;
}

game::MixedEquilibrium EquilibriumFromJson(const json& j) {
  return {j.at("p").get<double>(), j.at("q").get<double>(), j.at("value1").get<double>(),
          j.at("value2").get<double>(), KindFromName(j.at("kind").get<std::string>())};
}

process::McSummary McSummaryFromJson(const json& j) {
  process::McSummary s;
  s.reps = j.at("reps").get<std::size_t>();
  s.exits = j.at("exits").get<std::size_t>();
  s.truncation_rate = j.at("truncation_rate").get<double>();
  s.a_prev = EstimateFromJson(j.at("a_prev"));
  s.tau_prev = EstimateFromJson(j.at("tau_prev"));
  s.a_exit = EstimateFromJson(j.at("a_exit"));
  s.tau_exit = EstimateFromJson(j.at("tau_exit"));
  s.nu = EstimateFromJson(j.at("nu"));
  s.nu_from_tau = EstimateFromJson(j.at("nu_from_tau"));
  s.functional = EstimateFromJson(j.at("functional"));
  const auto& a = j.at("args");
  s.args = {a.at("u").get<double>(), a.at("v").get<double>(), a.at("vartheta").get<double>(),
            a.at("theta").get<double>()};
  return s;
}

Report ReportFromJson(const json& j) {
  Report r;
  r.version = j.at("version").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config = j.at("config");
  r.fit = FitFromJson(j.at("fit"));
  r.feasibility = FeasibilityFromJson(j.at("feasibility"));
  r.hstar_paper = StageFromJson<hstar::HstarResult>(j.at("hstar_paper"), HstarFromJson);
  r.hstar_direct = StageFromJson<hstar::HstarResult>(j.at("hstar_direct"), HstarFromJson);
  r.moments = StageFromJson<transform::RestrictedMoments>(j.at("moments"), MomentsFromJson);
  r.game = StageFromJson<game::Game2x2>(j.at("game"), game::GameFromJson);
  r.equilibrium = StageFromJson<game::MixedEquilibrium>(j.at("equilibrium"), EquilibriumFromJson);
  r.mc = StageFromJson<process::McSummary>(j.at("mc"), McSummaryFromJson);
  const auto& d = j.at("diagnostics");
  r.h_star_source = d.at("h_star_source").get<std::string>();
  r.h_star = d.at("h_star").get<double>();
  r.notes = d.at("notes").get<std::vector<std::string>>();
  return r;
}

std::string Serialize(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace sbfp::pipeline
