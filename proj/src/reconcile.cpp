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

#include "sbfp/reconcile.hpp"

#include <cmath>
#include <limits>

#include "sbfp/error.hpp"
#include "sbfp/functional.hpp"

namespace sbfp::pipeline {
namespace {

using nlohmann::json;

json Number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

process::Estimate MeanAndSe(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return {mean, se};
}

double Ratio(double num, double den) {
  return den != 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

}  // namespace

ReconcileReport Reconcile(const process::ProcessParams& params,
                          const process::ObservationModel& obs,
                          const ReconcileOptions& options) {
  Require(obs.memoryless(), "reconcile requires exponential interarrival and initial delay");
  Require(!options.u_grid.empty() && !options.h_grid.empty(), "grids must be non-empty");
  for (double u : options.u_grid) Require(u >= 0.0, "u grid values must be >= 0");
  for (double h : options.h_grid) Require(h > 0.0, "h grid values must be > 0");
  Require(options.mc.reps >= 2, "reconcile needs at least 2 replications");

  ReconcileReport report;
  report.lst = transform::LstParams::FromProcess(params, obs, options.schedule_k);
  const auto exits = process::CollectExits(params, obs, options.mc);
  report.reps = exits.size();
  for (const auto& e : exits) report.exits += e ? 1 : 0;
  report.truncation_rate =
      static_cast<double>(report.reps - report.exits) / static_cast<double>(report.reps);

  const double dm = report.lst.delta_mean;
  const std::array<double, 2> limit_h{kSmallHorizon * dm, kLargeHorizon * dm};
  const std::array<double, 2> limit_expected{1.0, 0.0};
  for (std::size_t i = 0; i < 2; ++i) {
    ForcedLimit& f = report.forced_limits[i];
    f.h = limit_h[i];
    f.expected = limit_expected[i];
    f.analytic = transform::PhiNu({0.0, 0.0, 0.0, 0.0, f.h}, report.lst);
    f.pass = std::abs(f.analytic - f.expected) <= kForcedLimitTolerance;
  }

  std::vector<double> a(report.reps), b(report.reps), c(report.reps);
  for (double u : options.u_grid) {
    for (double h : options.h_grid) {
      for (std::size_t i = 0; i < exits.size(); ++i) {
        const auto& e = exits[i];
        if (!e) {
          a[i] = b[i] = c[i] = 0.0;
          continue;
        }
        const double weight = std::exp(-u * e->a_prev);
        a[i] = (e->tau_prev <= h && h < e->tau_exit) ? weight : 0.0;
        b[i] = e->tau_exit > h ? weight : 0.0;
        c[i] = weight;
      }
      ReconcileRow row;
      row.u = u;
      row.h = h;
      row.analytic = transform::PhiNu({u, 0.0, 0.0, 0.0, h}, report.lst);
      const std::array<const std::vector<double>*, 3> samples{&a, &b, &c};
      const std::array<const char*, 3> names{"a", "b", "c"};
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < 3; ++k) {
        const process::Estimate est = MeanAndSe(*samples[k]);
        CandidateEstimate& cand = row.candidates[k];
        cand.event = names[k];
        cand.mc_mean = est.mean;
        cand.mc_se = est.se;
        cand.abs_deviation = std::abs(est.mean - row.analytic);
        cand.rel_deviation = Ratio(cand.abs_deviation, std::abs(row.analytic));
        cand.z_score = Ratio(cand.abs_deviation, est.se);
        if (cand.abs_deviation < best) {
          best = cand.abs_deviation;
          row.best_match = cand.event;
        }
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

json ToJson(const ReconcileReport& r) {
  json rows = json::array();
  for (const ReconcileRow& row : r.rows) {
    json cands = json::array();
    for (const CandidateEstimate& c : row.candidates) {
      cands.push_back({{"event", c.event},
                       {"mc_mean", c.mc_mean},
                       {"mc_se", c.mc_se},
                       {"abs_deviation", c.abs_deviation},
                       {"rel_deviation", Number(c.rel_deviation)},
                       {"z_score", Number(c.z_score)}});
    }
    rows.push_back({{"u", row.u},
                    {"h", row.h},
                    {"analytic", row.analytic},
                    {"candidates", cands},
                    {"best_match", row.best_match}});
  }
  json limits = json::array();
  for (const ForcedLimit& f : r.forced_limits) {
    limits.push_back(
        {{"h", f.h}, {"expected", f.expected}, {"analytic", f.analytic}, {"pass", f.pass}});
  }
  const transform::LstParams& p = r.lst;
  return {{"params",
           {{"delta_mean", p.delta_mean},
            {"delta0_mean", p.delta0_mean},
            {"sigma", p.sigma},
            {"a0", p.a0},
            {"w_bar", p.w_bar},
            {"w_prev", p.w_prev},
            {"w_exit", p.w_exit}}},
          {"reps", r.reps},
          {"exits", r.exits},
          {"truncation_rate", r.truncation_rate},
          {"forced_limits", limits},
          {"rows", rows}};
}

}  // namespace sbfp::pipeline
