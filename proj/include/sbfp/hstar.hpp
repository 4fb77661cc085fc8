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

// Optimal turning-point moment h*.
//
// Paper mode solves the closed-form transcendental equation
//
//   A exp(h / (2 dm)) = (U - h) / (h - V)
//
// by grid scan and bisection. Direct mode inverts -dPsi/du|_{u=0} exactly into
// m(h), a finite exponential sum, and locates the first stationary point of m.

#ifndef SBFP_HSTAR_HPP_
#define SBFP_HSTAR_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbfp/lst.hpp"
#include "sbfp/rational.hpp"

namespace sbfp::hstar {

inline constexpr double kPaperTolerance = 1e-9;
inline constexpr double kDirectTolerance = 1e-10;  // relative to max grid |m'|
inline constexpr std::size_t kPaperGridPoints = 512;
inline constexpr std::size_t kDirectGridPoints = 4096;
inline constexpr double kPoleGuard = 1e-8;
inline constexpr double kFallbackSpan = 20.0;  // in units of delta_mean
inline constexpr double kDirectSpan = 50.0;    // in units of delta_mean

struct HstarProblem {
  double delta_mean = 1.0;
  double w_bar = 1.0;
  double w_prev = 1.0;
  double a0 = 0.0;                      // direct mode only
  std::optional<double> delta0_mean;    // direct mode only; defaults to delta_mean

  void Validate() const;
  transform::LstParams ToLstParams() const;
};

struct UvaConstants {
  double u_const = 0.0;
  double v_const = 0.0;
  double a_const = 0.0;
};

// Throws kDegenerateDrift when w_bar == w_prev or w_bar == 0.
UvaConstants ComputeUva(const HstarProblem& p);

struct Feasibility {
  bool feasible = false;
  double lower = 0.0;
  double upper = 0.0;
};

Feasibility CheckFeasibility(const HstarProblem& p);

enum class Mode { kPaper, kDirect };
enum class Status { kSuccess, kNoRootInBracket, kNoStationaryPoint, kToleranceNotMet };
enum class Extremum { kNone, kMaximum, kMinimum, kFlat };

std::string_view StatusName(Status s);
std::string_view ExtremumName(Extremum e);

struct ScanSummary {
  std::size_t grid_points = 0;
  std::size_t sign_changes = 0;
  std::vector<double> roots;   // every refined root, ascending
  double min_abs = 0.0;        // smallest |residual| on the grid
  double argmin = 0.0;
  double scale = 0.0;          // largest |residual| on the grid
};

struct HstarResult {
  Status status = Status::kNoRootInBracket;
  Mode mode = Mode::kPaper;
  double h_star = 0.0;
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool feasible = false;
  Extremum extremum = Extremum::kNone;
  std::optional<UvaConstants> constants;
  ScanSummary diagnostics;

  bool ok() const { return status == Status::kSuccess; }
};

// g(h) = A exp(h / (2 dm)) - (U - h) / (h - V).
double PaperResidual(const UvaConstants& c, double delta_mean, double h);

HstarResult SolvePaper(const HstarProblem& p, double tol = kPaperTolerance);

// m(h) and its first two derivatives as exponential sums.
struct DirectCurve {
  transform::ExpSum m;
  transform::ExpSum dm;
  transform::ExpSum d2m;
};

DirectCurve BuildDirectCurve(const transform::LstParams& params);

HstarResult SolveDirect(const HstarProblem& p, const transform::LstParams& params,
                        double tol = kDirectTolerance);
inline HstarResult SolveDirect(const HstarProblem& p, double tol = kDirectTolerance) {
  return SolveDirect(p, p.ToLstParams(), tol);
}

struct ModeComparisonRow {
  HstarProblem problem;
  bool feasible = false;
  std::optional<HstarResult> paper;
  std::optional<HstarResult> direct;
  std::string paper_error;    // exception text when the solver threw
  std::string direct_error;
  std::optional<double> difference;  // |h_paper - h_direct| when both succeed
};

std::vector<ModeComparisonRow> CompareModes(std::span<const HstarProblem> grid);

}  // namespace sbfp::hstar

#endif  // SBFP_HSTAR_HPP_
