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

// Two-player 2x2 game between a controller (Hold / Action) and nature
// (Up / Down), solved for a mixed-strategy equilibrium.

#ifndef SBFP_GAME_HPP_
#define SBFP_GAME_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace sbfp::game {

using Matrix2 = std::array<std::array<double, 2>, 2>;

// Entry [i][j]: row i of player 1, column j of player 2.
struct Game2x2 {
  std::array<std::string, 2> row_labels{"Hold", "Action"};
  std::array<std::string, 2> col_labels{"Up", "Down"};
  Matrix2 payoff1{};
  Matrix2 payoff2{};

  void Validate() const;
};

enum class EquilibriumKind { kInterior, kPureStrategy, kContinuum };
std::string_view EquilibriumKindName(EquilibriumKind kind);

// p: probability of row 0 (Hold); q: probability of column 0 (Up).
struct MixedEquilibrium {
  double p = 0.0;
  double q = 0.0;
  double value1 = 0.0;
  double value2 = 0.0;
  EquilibriumKind kind = EquilibriumKind::kPureStrategy;
};

struct Payoffs {
  double value1 = 0.0;
  double value2 = 0.0;
};

Payoffs ExpectedPayoff(const Game2x2& g, double p, double q);

// Largest gain either player obtains from a pure unilateral deviation.
double DeviationGain(const Game2x2& g, double p, double q);

MixedEquilibrium SolveMixed(const Game2x2& g);

struct GridPoint {
  double p = 0.0;
  double q = 0.0;
  double gain = 0.0;
};

// Gains within this tolerance (relative to the largest |payoff|, at least 1)
// are ties in BruteForce.
inline constexpr double kTieTolerance = 1e-12;

// Minimizes DeviationGain over a grid_n x grid_n lattice on [0,1]^2. Among tied
// minimizers the most mixed one (largest min(p, 1-p, q, 1-q)) wins, then the
// first in (p, q) scan order.
GridPoint BruteForce(const Game2x2& g, int grid_n);

struct PayoffOverrides {
  std::array<std::array<std::optional<double>, 2>, 2> payoff1{};
  std::array<std::array<std::optional<double>, 2>, 2> payoff2{};
};

// Stand-in payoff builder:
//   player 1: (Hold, Up) = a_prev + mean_step, (Hold, Down) = a_exit,
//             (Action, *) = a_prev - cost
//   player 2: zero, or -payoff1 when zero_sum is set.
// Overrides are applied last.
Game2x2 PayoffFromAnalytics(double a_prev, double a_exit, double mean_step, double cost,
                            const PayoffOverrides& overrides = {}, bool zero_sum = false);

nlohmann::json GameToJson(const Game2x2& g);
Game2x2 GameFromJson(const nlohmann::json& j);
Game2x2 LoadGame(const std::string& path);

nlohmann::json EquilibriumToJson(const MixedEquilibrium& e);

}  // namespace sbfp::game

#endif  // SBFP_GAME_HPP_
