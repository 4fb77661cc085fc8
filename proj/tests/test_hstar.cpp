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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sbfp/error.hpp"
#include "sbfp/hstar.hpp"

using namespace sbfp;
using namespace sbfp::hstar;

namespace {

HstarProblem Problem(double dm, double w_bar, double w_prev) {
  HstarProblem p;
  p.delta_mean = dm;
  p.w_bar = w_bar;
  p.w_prev = w_prev;
  return p;
}

// Brackets of every sign change of f on an n-point uniform grid over [lo, hi].
std::vector<std::pair<double, double>> DenseBrackets(const auto& f, double lo, double hi,
                                                      std::size_t n) {
  std::vector<std::pair<double, double>> out;
  double prev_h = lo;
  double prev_v = f(lo);
  for (std::size_t i = 1; i < n; ++i) {
    const double h = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double v = f(h);
    if ((prev_v < 0.0) != (v < 0.0)) out.emplace_back(prev_h, h);
    prev_h = h;
    prev_v = v;
  }
  return out;
}

}  // namespace

TEST_SUITE("constants") {
  TEST_CASE("hand-computed constants") {
    const UvaConstants a = ComputeUva(Problem(1.0, 1.0, 1.4));
    // The double nearest 1.4 lies about 9e-17 below it, so the constants of
    // the stored input differ from the decimal ones in the last bits.
    CHECK(std::abs(a.u_const + 0.5) <= 1e-15);
    CHECK(std::abs(a.v_const - 2.2) <= 1e-15);
    CHECK(std::abs(a.a_const - 1.25) <= 1e-15);

    const UvaConstants b = ComputeUva(Problem(1.0, 1.0, 2.0));
    CHECK(b.u_const == -2.0);
    CHECK(b.v_const == 1.0);
    CHECK(b.a_const == 0.5);
  }

  TEST_CASE("constants match the printed quotients") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> pos(0.1, 4.0);
    for (int i = 0; i < 200; ++i) {
      const double d = pos(gen), wb = pos(gen), wp = pos(gen);
      if (std::abs(wb - wp) < 1e-3) continue;
      const UvaConstants c = ComputeUva(Problem(d, wb, wp));
      const double u = ((2.0 + d) * wp - (3.0 + d) * wb) / (wb - wp);
      const double v = ((3.0 + 2.0 * d) * wb - 2.0 * wp) / wb;
      const double a = wb / (2.0 * (wp - wb));
      CHECK(c.u_const == doctest::Approx(u).epsilon(1e-11));
      CHECK(c.v_const == doctest::Approx(v).epsilon(1e-11));
      CHECK(c.a_const == doctest::Approx(a).epsilon(1e-11));
    }
  }

  TEST_CASE("degenerate drifts") {
    for (const HstarProblem& p : {Problem(1.0, 1.0, 1.0), Problem(1.0, 0.0, 1.0)}) {
      try {
        ComputeUva(p);
        FAIL("expected DegenerateDrift");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kDegenerateDrift);
      }
    }
  }

  TEST_CASE("strictly feasible inputs have A > 0 and U < 0") {
    std::mt19937_64 gen(2026);
    std::uniform_real_distribution<double> dm(0.05, 10.0);
    std::uniform_real_distribution<double> wb(0.01, 10.0);
    std::uniform_real_distribution<double> t(0.0, 1.0);
    int positive_v = 0;
    for (int i = 0; i < 1000; ++i) {
      const double d = dm(gen), w = wb(gen);
      const double lo = (3.0 + d) / (2.0 + d) * w;
      const double hi = (3.0 + 2.0 * d) / 2.0 * w;
      const double s = 1e-6 + (1.0 - 2e-6) * t(gen);
      const HstarProblem p = Problem(d, w, lo + s * (hi - lo));
      REQUIRE(CheckFeasibility(p).feasible);
      const UvaConstants c = ComputeUva(p);
      CHECK(c.a_const > 0.0);
      CHECK(c.u_const < 0.0);
      if (c.v_const > 0.0) ++positive_v;
    }
    MESSAGE("V > 0 in " << positive_v << " of 1000 feasible samples");
  }
}

TEST_SUITE("feasibility") {
  TEST_CASE("bounds and examples") {
    const Feasibility f = CheckFeasibility(Problem(1.0, 1.0, 1.4));
    CHECK(f.lower == doctest::Approx(4.0 / 3.0));
    CHECK(f.upper == doctest::Approx(2.5));
    CHECK(f.feasible);
    CHECK_FALSE(CheckFeasibility(Problem(1.0, 1.0, 1.0)).feasible);
    CHECK(CheckFeasibility(Problem(1.0, 1.0, 2.5)).feasible);
    CHECK_FALSE(CheckFeasibility(Problem(1.0, 1.0, 2.5000001)).feasible);
  }
}

TEST_SUITE("paper mode") {
  TEST_CASE("reference problem") {
    const HstarProblem p = Problem(1.0, 1.0, 1.4);
    const HstarResult r = SolvePaper(p);
    REQUIRE(r.ok());
    CHECK(r.feasible);
    CHECK(r.h_star == doctest::Approx(1.444).epsilon(1e-3));
    CHECK(r.residual < kPaperTolerance);
    CHECK(std::abs(PaperResidual(*r.constants, p.delta_mean, r.h_star)) < kPaperTolerance);
    CHECK(r.bracket_hi < r.constants->v_const);

    // Dense scan oracle on (0, V).
    const auto g = [&](double h) { return PaperResidual(*r.constants, 1.0, h); };
    const auto brackets = DenseBrackets(g, 1e-9, r.constants->v_const - 1e-8, 1'000'000);
    REQUIRE(brackets.size() == 1);
    CHECK(brackets[0].first >= 1.44);
    CHECK(brackets[0].second <= 1.45);
    CHECK(r.h_star >= brackets[0].first - 1e-6);
    CHECK(r.h_star <= brackets[0].second + 1e-6);
  }

  TEST_CASE("feasible problem without a root") {
    const HstarProblem p = Problem(1.0, 1.0, 2.0);
    CHECK(CheckFeasibility(p).feasible);
    const HstarResult r = SolvePaper(p);
    CHECK(r.status == Status::kNoRootInBracket);
    CHECK(r.diagnostics.sign_changes == 0);
    CHECK(r.diagnostics.min_abs > 0.0);
    const UvaConstants c = ComputeUva(p);
    for (int i = 1; i < 1000; ++i) CHECK(PaperResidual(c, 1.0, 0.001 * i) < 0.0);
  }

  TEST_CASE("roots agree with a dense-scan oracle") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> dm(0.2, 3.0);
    std::uniform_real_distribution<double> t(0.05, 0.95);
    int solved = 0;
    for (int i = 0; i < 40; ++i) {
      const double d = dm(gen);
      const double lo = (3.0 + d) / (2.0 + d);
      const double hi = (3.0 + 2.0 * d) / 2.0;
      const HstarProblem p = Problem(d, 1.0, lo + t(gen) * (hi - lo));
      const HstarResult r = SolvePaper(p);
      if (!r.ok()) continue;
      ++solved;
      const auto g = [&](double h) { return PaperResidual(*r.constants, d, h); };
      const auto brackets = DenseBrackets(g, 0.0, r.bracket_hi, 200'000);
      REQUIRE_FALSE(brackets.empty());
      CHECK(r.h_star >= brackets.front().first - 1e-6);
      CHECK(r.h_star <= brackets.front().second + 1e-6);
      CHECK(std::abs(g(r.h_star)) < kPaperTolerance);
    }
    MESSAGE("paper mode solved " << solved << " of 40 feasible problems");
    CHECK(solved > 0);
  }

  TEST_CASE("non-positive V uses the fallback span") {
    // V = (3 + 2d) - 2 w_prev / w_bar <= 0 once w_prev >= 2.5 w_bar at d = 1.
    const HstarResult r = SolvePaper(Problem(1.0, 1.0, 3.0));
    REQUIRE(r.constants);
    CHECK(r.constants->v_const <= 0.0);
    CHECK(r.bracket_hi == doctest::Approx(kFallbackSpan));
  }
}

TEST_SUITE("direct mode") {
  TEST_CASE("reference problem") {
    HstarProblem p = Problem(1.0, 1.0, 1.4);
    transform::LstParams params = p.ToLstParams();
    params.sigma = 1.0;
    const HstarResult r = SolveDirect(p, params);
    REQUIRE(r.ok());
    CHECK(r.extremum == Extremum::kMaximum);

    const DirectCurve curve = BuildDirectCurve(params);
    CHECK(std::abs(curve.dm(r.h_star)) < 1e-8 * r.diagnostics.scale);

    // Argmax of m on a 1e5-point grid over the span.
    double best_h = 0.0;
    double best = -1e300;
    const double span = kDirectSpan * p.delta_mean;
    for (int i = 1; i <= 100'000; ++i) {
      const double h = span * i / 100'000.0;
      const double v = curve.m(h);
      if (v > best) {
        best = v;
        best_h = h;
      }
    }
    CHECK(std::abs(best_h - r.h_star) <= 1e-3);
    // Refine the grid oracle around its coarse maximizer.
    double fine_h = best_h;
    for (int i = -1000; i <= 1000; ++i) {
      const double h = best_h + i * 1e-6;
      if (curve.m(h) > curve.m(fine_h)) fine_h = h;
    }
    CHECK(std::abs(fine_h - r.h_star) <= 1e-4);
  }

  TEST_CASE("no turning structure without drift") {
    HstarProblem p = Problem(1.0, 0.0, 0.0);
    transform::LstParams params = p.ToLstParams();
    params.sigma = 0.0;
    const HstarResult r = SolveDirect(p, params);
    CHECK(r.status == Status::kNoStationaryPoint);
  }

  TEST_CASE("parameters must match the problem") {
    const HstarProblem p = Problem(1.0, 1.0, 1.4);
    transform::LstParams params = p.ToLstParams();
    params.w_bar = 1.1;
    CHECK_THROWS_AS(SolveDirect(p, params), Error);
  }

  TEST_CASE("success implies the residual bound") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> pos(0.3, 2.5);
    for (int i = 0; i < 20; ++i) {
      HstarProblem p = Problem(pos(gen), pos(gen), pos(gen));
      if (p.w_bar == p.w_prev) continue;
      const HstarResult r = SolveDirect(p);
      if (!r.ok()) continue;
      const DirectCurve curve = BuildDirectCurve(p.ToLstParams());
      CHECK(std::abs(curve.dm(r.h_star)) < kDirectTolerance * r.diagnostics.scale);
    }
  }
}

TEST_SUITE("mode comparison") {
  std::vector<HstarProblem> FeasibleGrid() {
    std::vector<HstarProblem> grid;
    for (double d : {0.5, 1.0, 2.0, 4.0}) {
      for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double lo = (3.0 + d) / (2.0 + d);
        const double hi = (3.0 + 2.0 * d) / 2.0;
        grid.push_back(Problem(d, 1.0, lo + t * (hi - lo)));
      }
    }
    return grid;
  }

  TEST_CASE("record shape and determinism") {
    const auto grid = FeasibleGrid();
    REQUIRE(grid.size() == 20);
    const auto rows = CompareModes(grid);
    const auto again = CompareModes(grid);
    REQUIRE(rows.size() == 20);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].feasible);
      CHECK((rows[i].paper.has_value() || !rows[i].paper_error.empty()));
      CHECK((rows[i].direct.has_value() || !rows[i].direct_error.empty()));
      CHECK(rows[i].difference.has_value() ==
            (rows[i].paper && rows[i].paper->ok() && rows[i].direct && rows[i].direct->ok()));
      CHECK(rows[i].paper->h_star == again[i].paper->h_star);
      CHECK(rows[i].direct->h_star == again[i].direct->h_star);
      CHECK(rows[i].paper->status == again[i].paper->status);
    }
  }

  TEST_CASE("paper failure with direct success is tagged") {
    const std::vector<HstarProblem> grid{Problem(1.0, 1.0, 2.0)};
    const auto rows = CompareModes(grid);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].paper);
    CHECK(rows[0].paper->status == Status::kNoRootInBracket);
    REQUIRE(rows[0].direct);
    CHECK(rows[0].direct->ok());
    CHECK_FALSE(rows[0].difference);
  }
}
