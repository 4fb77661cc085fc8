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

#include "sbfp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbfp/error.hpp"
#include "sbfp/game.hpp"
#include "sbfp/hstar.hpp"
#include "sbfp/pipeline.hpp"
#include "sbfp/process.hpp"
#include "sbfp/reconcile.hpp"
#include "sbfp/series.hpp"

namespace sbfp::cli {
namespace {

using nlohmann::json;

void Emit(const json& j, const std::string& path, std::ostream& out) {
  const std::string text = pipeline::Serialize(j);
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) Fail(ErrorCode::kIo, "cannot write " + path);
  file << text;
  if (!file) Fail(ErrorCode::kIo, "failed writing " + path);
}

// Flags shared by simulate and reconcile.
struct ProcessFlags {
  double sigma = 1.0;
  double a0 = 0.0;
  std::vector<double> drift{0.0};
  std::string drift_ext = "hold";
  double delta_mean = 1.0;
  std::optional<double> delta0_mean;
  bool deterministic = false;
  std::string shape = "concave";
  std::string threshold = "zero";
  std::uint64_t seed = 1;
  std::size_t max_steps = process::kDefaultMaxSteps;
  unsigned threads = 0;

  void Register(CLI::App* cmd, bool allow_deterministic) {
    cmd->add_option("--sigma", sigma, "diffusion coefficient")->capture_default_str();
    cmd->add_option("--a0", a0, "initial position")->capture_default_str();
    cmd->add_option("--drift", drift, "drift slopes w1,w2,...")->delimiter(',');
    cmd->add_option("--drift-ext", drift_ext, "schedule extension")
        ->check(CLI::IsMember({"hold", "cycle"}))
        ->capture_default_str();
    cmd->add_option("--delta-mean", delta_mean, "mean observation interval")
        ->capture_default_str();
    auto* d0 = cmd->add_option("--delta0-mean", delta0_mean, "mean initial delay");
    if (allow_deterministic) {
      cmd->add_flag("--deterministic", deterministic, "regular observation epochs")
          ->excludes(d0);
    }
    cmd->add_option("--shape", shape)->check(CLI::IsMember({"concave", "convex"}))
        ->capture_default_str();
    cmd->add_option("--threshold", threshold)->check(CLI::IsMember({"zero", "paper"}))
        ->capture_default_str();
    cmd->add_option("--seed", seed)->capture_default_str();
    cmd->add_option("--max-steps", max_steps)->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (0: all cores)");
  }

  process::ProcessParams Params() const {
    process::ProcessParams p;
    p.sigma = sigma;
    p.a0 = a0;
    p.drift = process::DriftSchedule(
        drift, drift_ext == "cycle" ? process::DriftExtension::kCycle
                                    : process::DriftExtension::kHoldLast);
    p.shape = shape == "convex" ? process::Shape::kConvex : process::Shape::kConcave;
    p.threshold_mode = threshold == "paper" ? process::ThresholdMode::kPaperLiteral
                                            : process::ThresholdMode::kZeroSign;
    p.Validate();
    return p;
  }

  process::ObservationModel Observation() const {
    if (deterministic) return process::ObservationModel::Regular(delta_mean);
    return process::ObservationModel::Memoryless(delta_mean, delta0_mean.value_or(delta_mean));
  }

  json Echo() const {
    return {{"sigma", sigma},
            {"a0", a0},
            {"drift", drift},
            {"drift_ext", drift_ext},
            {"delta_mean", delta_mean},
            {"delta0_mean", deterministic ? json(0.0) : json(delta0_mean.value_or(delta_mean))},
            {"deterministic", deterministic},
            {"shape", shape},
            {"threshold", threshold},
            {"seed", seed},
            {"max_steps", max_steps}};
  }
};

struct GameFlags {
  std::string payoff_file;
  std::optional<double> a_prev;
  std::optional<double> a_exit;
  double mean_step = 0.0;
  double cost = 0.0;
  bool zero_sum = false;

  void Register(CLI::App* cmd, bool with_builder_inputs) {
    auto* file = cmd->add_option("--payoff", payoff_file, "payoff matrices (JSON)");
    if (with_builder_inputs) {
      cmd->add_option("--a-prev", a_prev, "E[A_{nu-1}]")->excludes(file);
      cmd->add_option("--a-exit", a_exit, "E[A_nu]")->excludes(file);
      cmd->add_option("--mean-step", mean_step, "w_bar * delta_mean")->excludes(file);
    }
    cmd->add_option("--cost", cost, "transaction cost")->capture_default_str();
    cmd->add_flag("--zero-sum", zero_sum, "nature receives -payoff1");
  }
};

int HandleSimulate(const ProcessFlags& pf, const process::TransformArgs& args,
                   std::size_t reps, const std::string& out_path, std::ostream& out) {
  const process::ProcessParams params = pf.Params();
  const process::ObservationModel obs = pf.Observation();
  process::McConfig cfg{reps, pf.seed, pf.max_steps, pf.threads};
  const process::McSummary s = process::McEstimate(params, obs, args, cfg);
  json echo = pf.Echo();
  echo["reps"] = reps;
  Emit({{"params", echo}, {"summary", pipeline::ToJson(s)}}, out_path, out);
  return kExitOk;
}

void WritePlotData(const hstar::HstarProblem& p, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) Fail(ErrorCode::kIo, "cannot write " + path);
  std::optional<hstar::DirectCurve> curve;
  std::optional<hstar::UvaConstants> uva;
  try {
    curve = hstar::BuildDirectCurve(p.ToLstParams());
  } catch (const Error&) {
  }
  try {
    uva = hstar::ComputeUva(p);
  } catch (const Error&) {
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double span = hstar::kDirectSpan * p.delta_mean;
  constexpr int kPoints = 1000;
  file << "h,m_h,g_h\n";
  char buf[128];
  for (int i = 1; i <= kPoints; ++i) {
    const double h = span * i / kPoints;
    const double m = curve ? curve->m(h) : nan;
    double g = nan;
    if (uva && std::abs(h - uva->v_const) >= hstar::kPoleGuard * std::max(1.0, std::abs(uva->v_const))) {
      g = hstar::PaperResidual(*uva, p.delta_mean, h);
    }
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", h, m, g);
    file << buf;
  }
}

json SolveStage(const std::function<hstar::HstarResult()>& solve, bool& ok) {
  try {
    const hstar::HstarResult r = solve();
    ok = ok && r.ok();
    json j = pipeline::ToJson(r);
    j["status"] = r.ok() ? "ok" : "failed";
    if (!r.ok()) j["reason"] = hstar::StatusName(r.status);
    return j;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw;
    ok = false;
    return {{"status", "failed"}, {"reason", e.what()}};
  }
}

int HandleHstar(const hstar::HstarProblem& p, const std::string& mode,
                std::optional<double> tol, const std::string& plot_path,
                const std::string& out_path, std::ostream& out) {
  p.Validate();
  json doc = {{"problem",
               {{"delta_mean", p.delta_mean},
                {"w_bar", p.w_bar},
                {"w_prev", p.w_prev},
                {"a0", p.a0},
                {"delta0_mean", p.delta0_mean.value_or(p.delta_mean)}}},
              {"feasibility", pipeline::ToJson(hstar::CheckFeasibility(p))}};
  bool ok = true;
  if (mode == "paper" || mode == "both") {
    doc["paper"] = SolveStage(
        [&] { return hstar::SolvePaper(p, tol.value_or(hstar::kPaperTolerance)); }, ok);
  }
  if (mode == "direct" || mode == "both") {
    doc["direct"] = SolveStage(
        [&] { return hstar::SolveDirect(p, tol.value_or(hstar::kDirectTolerance)); }, ok);
  }
  if (!plot_path.empty()) WritePlotData(p, plot_path);
  Emit(doc, out_path, out);
  return ok ? kExitOk : kExitDomain;
}

int HandleGame(const GameFlags& gf, int brute_force, const std::string& out_path,
               std::ostream& out) {
  game::Game2x2 g;
  if (!gf.payoff_file.empty()) {
    g = game::LoadGame(gf.payoff_file);
  } else {
    if (!gf.a_prev || !gf.a_exit) {
      throw CLI::RequiredError("--a-prev and --a-exit (or --payoff)");
    }
    g = game::PayoffFromAnalytics(*gf.a_prev, *gf.a_exit, gf.mean_step, gf.cost, {},
                                  gf.zero_sum);
  }
  const game::MixedEquilibrium e = game::SolveMixed(g);
  json doc = {{"game", game::GameToJson(g)}, {"equilibrium", game::EquilibriumToJson(e)}};
  if (brute_force > 0) {
    const game::GridPoint b = game::BruteForce(g, brute_force);
    doc["brute_force"] = {{"grid_n", brute_force}, {"p", b.p}, {"q", b.q}, {"gain", b.gain}};
  }
  Emit(doc, out_path, out);
  return kExitOk;
}

int ExitCodeFor(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIo:
    case ErrorCode::kParseError:
    case ErrorCode::kEmptySeries:
      return kExitUsage;
    default:
      return kExitDomain;
  }
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shifted Brownian fluctuation process toolkit", "sbfp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pipeline::kToolVersion));
  std::function<int()> action;
  std::string out_path;

  // simulate
  ProcessFlags sim;
  process::TransformArgs sim_args;
  std::size_t sim_reps = 10'000;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates of exit statistics");
  sim.Register(simulate, true);
  simulate->add_option("--reps", sim_reps)->capture_default_str();
  simulate->add_option("--u", sim_args.u, "transform variable of A_{nu-1}");
  simulate->add_option("--v", sim_args.v, "transform variable of A_nu");
  simulate->add_option("--vartheta", sim_args.vartheta, "transform variable of tau_{nu-1}");
  simulate->add_option("--theta", sim_args.theta, "transform variable of tau_nu");
  simulate->add_option("--out", out_path, "output JSON file");
  simulate->callback([&] {
    action = [&] { return HandleSimulate(sim, sim_args, sim_reps, out_path, out); };
  });

  // hstar
  hstar::HstarProblem problem;
  std::string mode = "both";
  std::optional<double> tol;
  std::string plot_path;
  auto* hs = app.add_subcommand("hstar", "Optimal turning-point moment");
  hs->add_option("--delta-mean", problem.delta_mean)->required();
  hs->add_option("--w-bar", problem.w_bar)->required();
  hs->add_option("--w-prev", problem.w_prev)->required();
  hs->add_option("--a0", problem.a0, "direct mode only");
  hs->add_option("--delta0-mean", problem.delta0_mean, "direct mode only");
  hs->add_option("--mode", mode)->check(CLI::IsMember({"paper", "direct", "both"}))
      ->capture_default_str();
  hs->add_option("--tol", tol, "root tolerance (mode default when omitted)");
  hs->add_option("--plot-data", plot_path, "CSV of h, m_h, g_h");
  hs->add_option("--out", out_path, "output JSON file");
  hs->callback([&] {
    action = [&] { return HandleHstar(problem, mode, tol, plot_path, out_path, out); };
  });

  // game
  GameFlags gf;
  int brute_n = 0;
  auto* gm = app.add_subcommand("game", "Mixed equilibrium of the 2x2 payoff game");
  gf.Register(gm, true);
  gm->add_option("--brute-force", brute_n, "also scan an N x N grid");
  gm->add_option("--out", out_path, "output JSON file");
  gm->callback([&] { action = [&] { return HandleGame(gf, brute_n, out_path, out); }; });

  // fit
  std::string csv;
  std::size_t window = pipeline::kDefaultWindow;
  std::string time_unit = "obs";
  const auto add_fit_flags = [&](CLI::App* cmd) {
    cmd->add_option("--csv", csv, "input series (timestamp,value)")->required();
    cmd->add_option("--window", window)->capture_default_str();
    cmd->add_option("--time-unit", time_unit)
        ->check(CLI::IsMember({"obs", "sec", "day"}))
        ->capture_default_str();
  };
  auto* fit = app.add_subcommand("fit", "Estimate process parameters from a series");
  add_fit_flags(fit);
  fit->add_option("--out", out_path, "output JSON file");
  fit->callback([&] {
    action = [&] {
      const auto series = pipeline::LoadCsv(csv);
      const auto result = pipeline::FitParams(series, window, pipeline::ParseTimeUnit(time_unit));
      Emit(pipeline::ToJson(result), out_path, out);
      return kExitOk;
    };
  });

  // predict
  pipeline::PredictConfig pc;
  GameFlags pgf;
  auto* pred = app.add_subcommand("predict", "End-to-end turning-point report");
  add_fit_flags(pred);
  pred->add_option("--a0", pc.a0, "direct-mode initial position");
  pred->add_option("--delta0-mean", pc.delta0_mean, "direct-mode mean initial delay");
  pred->add_option("--tol", tol, "paper-mode root tolerance");
  pgf.Register(pred, false);
  pred->add_option("--seed", pc.seed)->capture_default_str();
  pred->add_option("--mc-reps", pc.mc_reps, "Monte Carlo replications (0: skip)");
  pred->add_option("--max-steps", pc.max_steps)->capture_default_str();
  pred->add_option("--threads", pc.threads, "worker threads (0: all cores)");
  pred->add_option("--out", out_path, "output JSON file");
  pred->callback([&] {
    action = [&] {
      pc.window = window;
      pc.time_unit = pipeline::ParseTimeUnit(time_unit);
      if (tol) pc.paper_tol = *tol;
      pc.cost = pgf.cost;
      pc.zero_sum = pgf.zero_sum;
      if (!pgf.payoff_file.empty()) pc.payoff = game::LoadGame(pgf.payoff_file);
      const auto series = pipeline::LoadCsv(csv);
      const pipeline::Report report = pipeline::Predict(series, pc);
      Emit(pipeline::ToJson(report), out_path, out);
      const bool complete = report.hstar_paper.ok() && report.hstar_direct.ok() &&
                            report.moments.ok() && report.equilibrium.ok() &&
                            (report.mc.ok() || pc.mc_reps == 0);
      return complete ? kExitOk : kExitDomain;
    };
  });

  // reconcile
  ProcessFlags rec;
  pipeline::ReconcileOptions ro;
  ro.u_grid = {0.0, 0.5, 1.0, 2.0};
  ro.h_grid = {0.5, 1.0, 2.0, 4.0};
  std::size_t rec_reps = 100'000;
  auto* rc = app.add_subcommand("reconcile", "Analytic functional against Monte Carlo events");
  rec.Register(rc, false);
  rc->add_option("--u-grid", ro.u_grid)->delimiter(',');
  rc->add_option("--h-grid", ro.h_grid)->delimiter(',');
  rc->add_option("--reps", rec_reps)->capture_default_str();
  rc->add_option("--schedule-k", ro.schedule_k, "schedule prefix for analytic slopes")
      ->capture_default_str();
  rc->add_option("--out", out_path, "output JSON file");
  rc->callback([&] {
    action = [&] {
      ro.mc = {rec_reps, rec.seed, rec.max_steps, rec.threads};
      const auto report = pipeline::Reconcile(rec.Params(), rec.Observation(), ro);
      json doc = pipeline::ToJson(report);
      doc["process"] = rec.Echo();
      Emit(doc, out_path, out);
      return report.limits_hold() ? kExitOk : kExitDomain;
    };
  });

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    return action ? action() : kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace sbfp::cli
