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

// Laplace-Stieltjes building blocks for memoryless observation.
//
// With exponential interarrival times of mean dm every transform is a
// reciprocal affine form
//
//   gamma(w; omega, x) = 1 / (1 + dm * (sigma^2 omega^2 / 2 + w omega + x)),
//
// where the slope w selects which step the transform describes: the initial
// point (A0, with the initial-delay mean), the exit step, the step before exit,
// or the schedule average.

#ifndef SBFP_LST_HPP_
#define SBFP_LST_HPP_

#include <cmath>

#include "sbfp/error.hpp"
#include "sbfp/process.hpp"

namespace sbfp::transform {

// Evaluation refuses points this close to a pole of a reciprocal form.
inline constexpr double kPoleGuard = 1e-10;

struct LstParams {
  double delta_mean = 1.0;   // mean interarrival time
  double delta0_mean = 1.0;  // mean initial delay (0: no delay)
  double sigma = 0.0;
  double a0 = 0.0;
  double w_bar = 0.0;        // average slope over the schedule prefix
  double w_prev = 0.0;       // slope of the step before exit
  double w_exit = 0.0;       // slope of the exit step

  void Validate() const;

  // Slopes taken from the first k steps of the schedule: w_bar = mean of
  // w_1..w_k, w_prev = w_{k-1}, w_exit = w_k (k >= 2).
  static LstParams FromProcess(const process::ProcessParams& params,
                               const process::ObservationModel& obs,
                               std::size_t k);
};

enum class GammaKind { kInitial, kExit, kPrev, kAverage };

// (1 + dm * theta)^-1.
double DeltaLst(double theta, double delta_mean);
inline double Delta0Lst(double theta, double delta0_mean) {
  return DeltaLst(theta, delta0_mean);
}

struct AffineSlope {
  double dmean;
  double slope;
};

inline AffineSlope SlopeFor(GammaKind kind, const LstParams& p) {
  switch (kind) {
    case GammaKind::kInitial:
      return {p.delta0_mean, p.a0};
    case GammaKind::kExit:
      return {p.delta_mean, p.w_exit};
    case GammaKind::kPrev:
      return {p.delta_mean, p.w_prev};
    case GammaKind::kAverage:
      return {p.delta_mean, p.w_bar};
  }
  return {p.delta_mean, 0.0};
}

// Exponent sigma^2 omega^2 / 2 + w omega.
template <class T>
T DriftExponent(double sigma, double slope, const T& omega) {
  return 0.5 * sigma * sigma * omega * omega + slope * omega;
}

template <class T>
T GammaValue(GammaKind kind, const T& omega, const T& x, const LstParams& p) {
  const AffineSlope s = SlopeFor(kind, p);
  const T denom = 1 + s.dmean * (DriftExponent(p.sigma, s.slope, omega) + x);
  using std::abs;
  if (abs(denom) < kPoleGuard) Fail(ErrorCode::kPoleHit, "gamma denominator vanishes");
  return 1 / denom;
}

double GammaFn(GammaKind kind, double omega, double x, const LstParams& p);

// Intermediates of the closed form at a given (u, x).
struct PsiComponents {
  double g0 = 0.0;
  double g1 = 0.0;
  double d = 0.0;
  double d0 = 0.0;
  double d2 = 0.0;
};

PsiComponents ComputePsiComponents(double x, double u, const LstParams& p);

// Psi(x) = G0 + (G1/2) (1+D)^2 / ((2D+1)(1+D0)(1+D2)).
template <class T>
T PsiFactoredForm(const T& x, const T& u, const LstParams& p) {
  const T g0 = p.delta0_mean * x / (p.delta0_mean * x + 1);
  const T g1 = p.delta_mean * x / (p.delta_mean * x + 1);
  const T d = p.delta_mean * (DriftExponent(p.sigma, p.w_bar, u) + x);
  const T d0 = p.delta0_mean * (DriftExponent(p.sigma, p.a0, u) + x);
  const T d2 = p.delta_mean * (DriftExponent(p.sigma, p.w_prev, u) + x);
  const T denom = (2 * d + 1) * (1 + d0) * (1 + d2);
  using std::abs;
  if (abs(denom) < kPoleGuard) Fail(ErrorCode::kPoleHit, "psi denominator vanishes");
  return g0 + (g1 / 2) * (1 + d) * (1 + d) / denom;
}

// (1 - gamma0(0,x)) - (1/2) gamma0(u,x) gamma_prev(u,x) (1 - gamma_exit(0,x))
//                      / (gamma_avg(u,x)^2 - 2 gamma_avg(u,x)).
template <class T>
T PsiGammaForm(const T& x, const T& u, const LstParams& p) {
  const T zero(0);
  const T avg = GammaValue(GammaKind::kAverage, u, x, p);
  const T quad = avg * avg - 2 * avg;
  using std::abs;
  if (abs(quad) < kPoleGuard) Fail(ErrorCode::kPoleHit, "psi denominator vanishes");
  return (1 - GammaValue(GammaKind::kInitial, zero, x, p)) -
         T(0.5) * GammaValue(GammaKind::kInitial, u, x, p) *
             GammaValue(GammaKind::kPrev, u, x, p) *
             (1 - GammaValue(GammaKind::kExit, zero, x, p)) / quad;
}

struct PsiEvaluation {
  double value = 0.0;        // factored form
  double gamma_form = 0.0;   // same quantity through the gamma blocks
  PsiComponents components;
};

PsiEvaluation PsiTransform(double x, double u, const LstParams& p);

}  // namespace sbfp::transform

#endif  // SBFP_LST_HPP_
