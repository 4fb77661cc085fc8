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

// Gaver-Stehfest inversion of a Laplace-Carson transform.
//
//   f(h) ~ (ln 2 / h) sum_{k=1}^{N} V_k F(k ln 2 / h),   F(s) = g(s) / s,
//
// which simplifies to sum_k V_k g(k ln 2 / h) / k. The weights V_k grow like
// 10^(0.6 N) and alternate in sign, so the sum is formed in 50-digit arithmetic
// whenever the transform can be evaluated in that type; otherwise in long
// double, which limits useful orders to about 16.

#ifndef SBFP_STEHFEST_HPP_
#define SBFP_STEHFEST_HPP_

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>
#include <type_traits>
#include <vector>

#include "sbfp/error.hpp"

namespace sbfp::transform {

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

inline constexpr int kDefaultStehfestOrder = 14;
// Orders N and N-2 disagreeing by more than this (relative to max(1, |f|))
// mark the inversion as divergent.
inline constexpr double kStehfestStabilityTolerance = 1e-3;

template <class Real>
std::vector<Real> StehfestWeights(int order) {
  Require(order >= 2 && order % 2 == 0, "Stehfest order must be even and >= 2");
  const int half = order / 2;
  std::vector<Real> factorial(2 * order + 1);
  factorial[0] = 1;
  for (int i = 1; i <= 2 * order; ++i) factorial[i] = factorial[i - 1] * i;

  std::vector<Real> weights(order);
  for (int k = 1; k <= order; ++k) {
    Real sum = 0;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      Real jpow = 1;
      for (int p = 0; p < half; ++p) jpow *= j;
      sum += jpow * factorial[2 * j] /
             (factorial[half - j] * factorial[j] * factorial[j - 1] * factorial[k - j] *
              factorial[2 * j - k]);
    }
    weights[k - 1] = ((k + half) % 2 == 0) ? sum : Real(-sum);
  }
  return weights;
}

template <class Real, class Transform>
Real StehfestSum(const Transform& g, const Real& h, int order) {
  const std::vector<Real> weights = StehfestWeights<Real>(order);
  const Real a = boost::math::constants::ln_two<Real>() / h;
  Real sum = 0;
  for (int k = 1; k <= order; ++k) {
    const Real x = a * k;
    sum += weights[k - 1] * Real(g(x)) / k;
  }
  return sum;
}

template <class Transform>
concept HighPrecisionTransform = requires(const Transform& g, HighPrecision x) {
  { g(x) } -> std::convertible_to<HighPrecision>;
};

// Evaluates f(h) for the Laplace-Carson transform g (callable on positive
// reals). Throws kDivergent when orders N and N-2 do not agree.
template <class Transform>
double LcInverseNumeric(const Transform& g, double h, int order = kDefaultStehfestOrder) {
  Require(h > 0.0, "numeric inversion needs h > 0");
  Require(order >= 4 && order % 2 == 0, "Stehfest order must be even and >= 4");
  double estimate = 0.0;
  double coarse = 0.0;
  if constexpr (HighPrecisionTransform<Transform>) {
    const HighPrecision hh(h);
    estimate = static_cast<double>(StehfestSum<HighPrecision>(g, hh, order));
    coarse = static_cast<double>(StehfestSum<HighPrecision>(g, hh, order - 2));
  } else {
    const auto narrow = [&g](long double x) {
      return static_cast<long double>(g(static_cast<double>(x)));
    };
    estimate = static_cast<double>(StehfestSum<long double>(narrow, h, order));
    coarse = static_cast<double>(StehfestSum<long double>(narrow, h, order - 2));
  }
  if (!std::isfinite(estimate) || !std::isfinite(coarse) ||
      std::abs(estimate - coarse) >
          kStehfestStabilityTolerance * std::max(1.0, std::abs(estimate))) {
    Fail(ErrorCode::kDivergent, "Gaver-Stehfest estimates at h=" + std::to_string(h) +
                                    " did not stabilize");
  }
  return estimate;
}

}  // namespace sbfp::transform

#endif  // SBFP_STEHFEST_HPP_
