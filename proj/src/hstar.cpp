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

#include "sbfp/hstar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "sbfp/error.hpp"
#include "sbfp/functional.hpp"

namespace sbfp::hstar {
namespace {

struct Bracket {
  double lo;
  double hi;
};

struct Scan {
  ScanSummary summary;
  std::vector<Bracket> brackets;
  std::vector<double> exact_roots;  // grid points where the function is exactly 0
};

Scan SignScan(const std::function<double(double)>& f, std::span<const double> grid) {
  Scan scan;
  scan.summary.grid_points = grid.size();
  scan.summary.min_abs = std::numeric_limits<double>::infinity();
  double prev_h = 0.0;
  double prev_v = std::numeric_limits<double>::quiet_NaN();
  for (double h : grid) {
    const double v = f(h);
    if (!std::isfinite(v)) {
      prev_v = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    if (std::abs(v) < scan.summary.min_abs) {
      scan.summary.min_abs = std::abs(v);
      scan.summary.argmin = h;
    }
    scan.summary.scale = std::max(scan.summary.scale, std::abs(v));
    if (v == 0.0) {
      scan.exact_roots.push_back(h);
    } else if (std::isfinite(prev_v) && prev_v != 0.0 && (prev_v < 0.0) != (v < 0.0)) {
      scan.brackets.push_back({prev_h, h});
    }
    prev_h = h;
    prev_v = v;
  }
  scan.summary.sign_changes = scan.brackets.size() + scan.exact_roots.size();
  return scan;
}

// Bisection until |f| < tol or the bracket collapses to adjacent doubles.
double Bisect(const std::function<double(double)>& f, Bracket b, double tol) {
  double f_lo = f(b.lo);
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (b.lo + b.hi);
    if (mid <= b.lo || mid >= b.hi) break;
    const double f_mid = f(mid);
    if (std::abs(f_mid) < tol) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      b.lo = mid;
      f_lo = f_mid;
    } else {
      b.hi = mid;
    }
  }
  const double f_a = std::abs(f(b.lo));
  const double f_b = std::abs(f(b.hi));
  return f_a <= f_b ? b.lo : b.hi;
}

std::vector<double> UniformGrid(double lo, double hi, std::size_t n, bool include_lo) {
  std::vector<double> grid;
  grid.reserve(n);
  const std::size_t first = include_lo ? 0 : 1;
  const std::size_t last = include_lo ? n - 1 : n;
  for (std::size_t i = first; i <= last; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(last));
  }
  return grid;
}

}  // namespace

void HstarProblem::Validate() const {
  Require(std::isfinite(delta_mean) && delta_mean > 0.0, "delta_mean must be > 0");
  Require(std::isfinite(w_bar) && std::isfinite(w_prev) && std::isfinite(a0),
          "drift inputs must be finite");
  if (delta0_mean) {
    Require(std::isfinite(*delta0_mean) && *delta0_mean >= 0.0, "delta0_mean must be >= 0");
  }
}

transform::LstParams HstarProblem::ToLstParams() const {
  Validate();
  transform::LstParams p;
  p.delta_mean = delta_mean;
  p.delta0_mean = delta0_mean.value_or(delta_mean);
  p.a0 = a0;
  p.w_bar = w_bar;
  p.w_prev = w_prev;
  p.w_exit = w_prev;
  return p;
}

std::string_view StatusName(Status s) {
  switch (s) {
    case Status::kSuccess:
      return "success";
    case Status::kNoRootInBracket:
      return "no_root_in_bracket";
    case Status::kNoStationaryPoint:
      return "no_stationary_point";
    case Status::kToleranceNotMet:
      return "tolerance_not_met";
  }
  return "unknown";
}

std::string_view ExtremumName(Extremum e) {
  switch (e) {
    case Extremum::kNone:
      return "none";
    case Extremum::kMaximum:
      return "maximum";
    case Extremum::kMinimum:
      return "minimum";
    case Extremum::kFlat:
      return "flat";
  }
  return "unknown";
}

UvaConstants ComputeUva(const HstarProblem& p) {
  p.Validate();
  if (p.w_bar == p.w_prev) Fail(ErrorCode::kDegenerateDrift, "w_bar equals w_prev");
  if (p.w_bar == 0.0) Fail(ErrorCode::kDegenerateDrift, "w_bar is zero");
  // Rearranged around gap = w_prev - w_bar:
  //   U = w_bar / gap - (2 + dm),  V = (3 + 2 dm) - 2 w_prev / w_bar,
  //   A = w_bar / (2 gap).
  const long double d = p.delta_mean;
  const long double w_bar = p.w_bar;
  const long double w_prev = p.w_prev;
  const long double gap = w_prev - w_bar;
  UvaConstants c;
  c.u_const = static_cast<double>(w_bar / gap - (2.0L + d));
  c.v_const = static_cast<double>((3.0L + 2.0L * d) - 2.0L * w_prev / w_bar);
  c.a_const = static_cast<double>(w_bar / (2.0L * gap));
  return c;
}

Feasibility CheckFeasibility(const HstarProblem& p) {
  p.Validate();
  const double d = p.delta_mean;
  Feasibility f;
  f.lower = (3.0 + d) / (2.0 + d) * p.w_bar;
  f.upper = (3.0 + 2.0 * d) / 2.0 * p.w_bar;
  f.feasible = f.lower <= p.w_prev && p.w_prev <= f.upper;
  return f;
}

double PaperResidual(const UvaConstants& c, double delta_mean, double h) {
  return c.a_const * std::exp(h / (2.0 * delta_mean)) - (c.u_const - h) / (h - c.v_const);
}

HstarResult SolvePaper(const HstarProblem& p, double tol) {
  const UvaConstants c = ComputeUva(p);
  HstarResult r;
  r.mode = Mode::kPaper;
  r.constants = c;
  r.feasible = CheckFeasibility(p).feasible;

  const double guard = 2.0 * kPoleGuard * std::max(1.0, std::abs(c.v_const));
  r.bracket_lo = 0.0;
  r.bracket_hi = c.v_const > 0.0 ? c.v_const - guard : kFallbackSpan * p.delta_mean;

  std::vector<double> grid = UniformGrid(r.bracket_lo, r.bracket_hi, kPaperGridPoints, true);
  // Only reachable on the fallback span; drop anything inside the pole guard.
  std::erase_if(grid, [&](double h) { return std::abs(h - c.v_const) < guard; });

  const auto g = [&](double h) { return PaperResidual(c, p.delta_mean, h); };
  Scan scan = SignScan(g, grid);
  r.diagnostics = scan.summary;

  std::vector<double> roots = scan.exact_roots;
  for (const Bracket& b : scan.brackets) roots.push_back(Bisect(g, b, tol));
  std::sort(roots.begin(), roots.end());
  r.diagnostics.roots = roots;
  if (roots.empty()) {
    r.status = Status::kNoRootInBracket;
    return r;
  }
  r.h_star = roots.front();
  r.residual = std::abs(g(r.h_star));
  r.status = r.residual < tol ? Status::kSuccess : Status::kToleranceNotMet;
  return r;
}

DirectCurve BuildDirectCurve(const transform::LstParams& params) {
  DirectCurve curve;
  curve.m = transform::InvertLc(transform::DduPsiRational(params));
  curve.dm = curve.m.Derivative();
  curve.d2m = curve.dm.Derivative();
  return curve;
}

HstarResult SolveDirect(const HstarProblem& p, const transform::LstParams& params,
                        double tol) {
  p.Validate();
  params.Validate();
  Require(params.delta_mean == p.delta_mean && params.w_bar == p.w_bar &&
              params.w_prev == p.w_prev,
          "direct-mode parameters must share delta_mean, w_bar and w_prev");
  const DirectCurve curve = BuildDirectCurve(params);

  HstarResult r;
  r.mode = Mode::kDirect;
  r.feasible = CheckFeasibility(p).feasible;
  r.bracket_lo = 0.0;
  r.bracket_hi = kDirectSpan * p.delta_mean;

  const std::vector<double> grid =
      UniformGrid(r.bracket_lo, r.bracket_hi, kDirectGridPoints, false);
  const auto slope = [&](double h) { return curve.dm(h); };
  Scan scan = SignScan(slope, grid);
  r.diagnostics = scan.summary;
  if (scan.summary.scale == 0.0) {
    r.status = Status::kNoStationaryPoint;
    return r;
  }

  const double abs_tol = tol * scan.summary.scale;
  std::vector<double> roots = scan.exact_roots;
  for (const Bracket& b : scan.brackets) roots.push_back(Bisect(slope, b, abs_tol));
  std::sort(roots.begin(), roots.end());
  r.diagnostics.roots = roots;
  if (roots.empty()) {
    r.status = Status::kNoStationaryPoint;
    return r;
  }
  r.h_star = roots.front();
  r.residual = std::abs(slope(r.h_star));
  const double curvature = curve.d2m(r.h_star);
  r.extremum = curvature < 0.0   ? Extremum::kMaximum
               : curvature > 0.0 ? Extremum::kMinimum
                                 : Extremum::kFlat;
  r.status = r.residual < abs_tol ? Status::kSuccess : Status::kToleranceNotMet;
  return r;
}

std::vector<ModeComparisonRow> CompareModes(std::span<const HstarProblem> grid) {
  std::vector<ModeComparisonRow> rows;
  rows.reserve(grid.size());
  for (const HstarProblem& p : grid) {
    ModeComparisonRow row;
    row.problem = p;
    try {
      row.feasible = CheckFeasibility(p).feasible;
      row.paper = SolvePaper(p);
    } catch (const std::exception& e) {
      row.paper_error = e.what();
    }
    try {
      row.direct = SolveDirect(p);
    } catch (const std::exception& e) {
      row.direct_error = e.what();
    }
    if (row.paper && row.paper->ok() && row.direct && row.direct->ok()) {
      row.difference = std::abs(row.paper->h_star - row.direct->h_star);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sbfp::hstar
