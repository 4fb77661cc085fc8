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

#include "sbfp/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include "sbfp/error.hpp"

namespace sbfp::game {
namespace {

// Player 1: Hold minus Action at column mix q, D1(q) = alpha q + beta (1 - q).
// Player 2: Up minus Down at row mix p, D2(p) = gamma p + eta (1 - p).
struct Preference {
  double at_one;
  double at_zero;

  double operator()(double t) const { return at_one * t + at_zero * (1.0 - t); }
  bool flat() const { return at_one == 0.0 && at_zero == 0.0; }

  // Solution of D(t) = 0, if the line crosses zero at a single point.
  std::optional<double> Root() const {
    const double slope = at_one - at_zero;
    if (slope == 0.0) return std::nullopt;
    return -at_zero / slope;
  }
};

Preference PlayerOne(const Game2x2& g) {
  const Matrix2& a = g.payoff1;
  return {a[0][0] - a[1][0], a[0][1] - a[1][1]};
}

Preference PlayerTwo(const Game2x2& g) {
  const Matrix2& b = g.payoff2;
  return {b[0][0] - b[0][1], b[1][0] - b[1][1]};
}

// Pure best response (1 = first strategy); ties resolve to 0.5.
double BestResponse(const Preference& d, double opponent) {
  const double v = d(opponent);
  return v > 0.0 ? 1.0 : (v < 0.0 ? 0.0 : 0.5);
}

MixedEquilibrium Finish(const Game2x2& g, double p, double q, EquilibriumKind kind) {
  const Payoffs v = ExpectedPayoff(g, p, q);
  return {p, q, v.value1, v.value2, kind};
}

Matrix2 ParseMatrix(const nlohmann::json& j, const char* key) {
  Require(j.contains(key), std::string("missing key ") + key);
  const auto& m = j.at(key);
  Require(m.is_array() && m.size() == 2, std::string(key) + " must be a 2x2 array");
  Matrix2 out{};
  for (std::size_t i = 0; i < 2; ++i) {
    Require(m[i].is_array() && m[i].size() == 2, std::string(key) + " must be a 2x2 array");
    for (std::size_t jj = 0; jj < 2; ++jj) {
      Require(m[i][jj].is_number(), std::string(key) + " entries must be numbers");
      out[i][jj] = m[i][jj].get<double>();
    }
  }
  return out;
}

std::array<std::string, 2> ParseLabels(const nlohmann::json& j, const char* key,
                                       std::array<std::string, 2> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& l = j.at(key);
  Require(l.is_array() && l.size() == 2, std::string(key) + " must hold two strings");
  return {l[0].get<std::string>(), l[1].get<std::string>()};
}

}  // namespace

void Game2x2::Validate() const {
  for (const Matrix2* m : {&payoff1, &payoff2}) {
    for (const auto& row : *m) {
      for (double v : row) Require(std::isfinite(v), "payoff entries must be finite");
    }
  }
}

std::string_view EquilibriumKindName(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::kInterior:
      return "interior";
    case EquilibriumKind::kPureStrategy:
      return "pure_strategy";
    case EquilibriumKind::kContinuum:
      return "continuum";
  }
  return "unknown";
}

Payoffs ExpectedPayoff(const Game2x2& g, double p, double q) {
  Require(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0, "mixed strategies must lie in [0,1]");
  const std::array<double, 2> row{p, 1.0 - p};
  const std::array<double, 2> col{q, 1.0 - q};
  Payoffs out;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      out.value1 += row[i] * col[j] * g.payoff1[i][j];
      out.value2 += row[i] * col[j] * g.payoff2[i][j];
    }
  }
  return out;
}

double DeviationGain(const Game2x2& g, double p, double q) {
  const Payoffs here = ExpectedPayoff(g, p, q);
  const double best1 = std::max(ExpectedPayoff(g, 1.0, q).value1,
                                ExpectedPayoff(g, 0.0, q).value1);
  const double best2 = std::max(ExpectedPayoff(g, p, 1.0).value2,
                                ExpectedPayoff(g, p, 0.0).value2);
  return std::max({0.0, best1 - here.value1, best2 - here.value2});
}

MixedEquilibrium SolveMixed(const Game2x2& g) {
  g.Validate();
  const Preference d1 = PlayerOne(g);
  const Preference d2 = PlayerTwo(g);

  // Strictly dominant pair.
  const bool row_dominant = (d1.at_one > 0.0 && d1.at_zero > 0.0) ||
                            (d1.at_one < 0.0 && d1.at_zero < 0.0);
  const bool col_dominant = (d2.at_one > 0.0 && d2.at_zero > 0.0) ||
                            (d2.at_one < 0.0 && d2.at_zero < 0.0);
  if (row_dominant && col_dominant) {
    return Finish(g, d1.at_one > 0.0 ? 1.0 : 0.0, d2.at_one > 0.0 ? 1.0 : 0.0,
                  EquilibriumKind::kPureStrategy);
  }

  // Degenerate indifference lines.
  if (d1.flat() || d2.flat()) {
    double p = 0.5;
    double q = 0.5;
    if (d1.flat() && !d2.flat()) {
      q = BestResponse(d2, p);
    } else if (d2.flat() && !d1.flat()) {
      p = BestResponse(d1, q);
    }
    return Finish(g, p, q, EquilibriumKind::kContinuum);
  }

  const std::optional<double> q_star = d1.Root();
  const std::optional<double> p_star = d2.Root();
  if (q_star && p_star && *q_star >= 0.0 && *q_star <= 1.0 && *p_star >= 0.0 &&
      *p_star <= 1.0) {
    return Finish(g, *p_star, *q_star, EquilibriumKind::kInterior);
  }

  // Best-response enumeration over pure profiles, strict equilibria first.
  MixedEquilibrium fallback;
  bool have_weak = false;
  for (double p : {1.0, 0.0}) {
    for (double q : {1.0, 0.0}) {
      const double v1 = d1(q) * (p == 1.0 ? 1.0 : -1.0);
      const double v2 = d2(p) * (q == 1.0 ? 1.0 : -1.0);
      if (v1 > 0.0 && v2 > 0.0) return Finish(g, p, q, EquilibriumKind::kPureStrategy);
      if (v1 >= 0.0 && v2 >= 0.0 && !have_weak) {
        fallback = Finish(g, p, q, EquilibriumKind::kPureStrategy);
        have_weak = true;
      }
    }
  }
  if (!have_weak) Fail(ErrorCode::kInvalidArgument, "game has no equilibrium profile");
  return fallback;
}

GridPoint BruteForce(const Game2x2& g, int grid_n) {
  Require(grid_n >= 2, "grid_n must be >= 2");
  g.Validate();
  const Matrix2& a = g.payoff1;
  const Matrix2& b = g.payoff2;
  const auto n = static_cast<std::size_t>(grid_n);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }

  // Row payoffs for player 1 as functions of q, column payoffs for player 2 as
  // functions of p.
  std::vector<double> hold(n), action(n), up(n), down(n);
  for (std::size_t i = 0; i < n; ++i) {
    hold[i] = t[i] * a[0][0] + (1.0 - t[i]) * a[0][1];
    action[i] = t[i] * a[1][0] + (1.0 - t[i]) * a[1][1];
    up[i] = t[i] * b[0][0] + (1.0 - t[i]) * b[1][0];
    down[i] = t[i] * b[0][1] + (1.0 - t[i]) * b[1][1];
  }

  double scale = 1.0;
  for (const Matrix2* m : {&a, &b})
    for (const auto& row : *m)
      for (double v : row) scale = std::max(scale, std::abs(v));
  const double tie = kTieTolerance * scale;
  const auto mixedness = [](double p, double q) {
    return std::min({p, 1.0 - p, q, 1.0 - q});
  };

  GridPoint best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t ip = 0; ip < n; ++ip) {
    const double p = t[ip];
    for (std::size_t iq = 0; iq < n; ++iq) {
      const double q = t[iq];
      const double v1 = p * hold[iq] + (1.0 - p) * action[iq];
      const double v2 = q * up[ip] + (1.0 - q) * down[ip];
      const double gain = std::max(
          {0.0, std::max(hold[iq], action[iq]) - v1, std::max(up[ip], down[ip]) - v2});
      if (gain < best.gain - tie ||
          (gain <= best.gain + tie && mixedness(p, q) > mixedness(best.p, best.q))) {
        best = {p, q, gain};
      }
    }
  }
  return best;
}

Game2x2 PayoffFromAnalytics(double a_prev, double a_exit, double mean_step, double cost,
                            const PayoffOverrides& overrides, bool zero_sum) {
  Require(std::isfinite(a_prev) && std::isfinite(a_exit) && std::isfinite(mean_step) &&
              std::isfinite(cost),
          "payoff inputs must be finite");
  Require(cost >= 0.0, "cost must be >= 0");
  Game2x2 g;
  g.payoff1 = {{{a_prev + mean_step, a_exit}, {a_prev - cost, a_prev - cost}}};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      if (overrides.payoff1[i][j]) g.payoff1[i][j] = *overrides.payoff1[i][j];
      g.payoff2[i][j] = zero_sum ? -g.payoff1[i][j] : 0.0;
      if (overrides.payoff2[i][j]) g.payoff2[i][j] = *overrides.payoff2[i][j];
    }
  }
  g.Validate();
  return g;
}

nlohmann::json GameToJson(const Game2x2& g) {
  return {{"row_labels", g.row_labels},
          {"col_labels", g.col_labels},
          {"payoff1", g.payoff1},
          {"payoff2", g.payoff2}};
}

Game2x2 GameFromJson(const nlohmann::json& j) {
  Require(j.is_object(), "game document must be a JSON object");
  Game2x2 g;
  g.row_labels = ParseLabels(j, "row_labels", g.row_labels);
  g.col_labels = ParseLabels(j, "col_labels", g.col_labels);
  g.payoff1 = ParseMatrix(j, "payoff1");
  g.payoff2 = ParseMatrix(j, "payoff2");
  g.Validate();
  return g;
}

Game2x2 LoadGame(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kIo, "invalid JSON in " + path + ": " + e.what());
  }
  return GameFromJson(j);
}

nlohmann::json EquilibriumToJson(const MixedEquilibrium& e) {
  return {{"p", e.p},
          {"q", e.q},
          {"value1", e.value1},
          {"value2", e.value2},
          {"kind", EquilibriumKindName(e.kind)}};
}

}  // namespace sbfp::game
