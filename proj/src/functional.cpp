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

#include "sbfp/functional.hpp"

#include <cmath>

namespace sbfp::transform {
namespace {

constexpr double kCoarseStep = 1e-4;
constexpr double kFineStep = 5e-5;

}  // namespace

FactoredRational PsiRational(double u, const LstParams& p) {
  p.Validate();
  const double dm = p.delta_mean;
  const double dm0 = p.delta0_mean;
  const double q_avg = DriftExponent(p.sigma, p.w_bar, u);
  const double q_init = DriftExponent(p.sigma, p.a0, u);
  const double q_prev = DriftExponent(p.sigma, p.w_prev, u);

  FactoredRational psi;
  // G0 = dm0 x / (dm0 x + 1)
  psi.Add(FactorTermBuilder().Times(0.0, dm0).Over(1.0, dm0).Build());
  // (G1 / 2) (1 + D)^2 / ((2D + 1)(1 + D0)(1 + D2))
  psi.Add(FactorTermBuilder(0.5)
              .Times(0.0, dm)
              .Over(1.0, dm)
              .Times(1.0 + dm * q_avg, dm)
              .Times(1.0 + dm * q_avg, dm)
              .Over(1.0 + 2.0 * dm * q_avg, 2.0 * dm)
              .Over(1.0 + dm0 * q_init, dm0)
              .Over(1.0 + dm * q_prev, dm)
              .Build());
  return psi;
}

FactoredRational DduPsiRational(const LstParams& p) {
  p.Validate();
  const double dm = p.delta_mean;
  const double dm0 = p.delta0_mean;
  // -dPsi/du|0 = (1/2) dm x / ((2 dm x + 1)(1 + dm0 x))
  //              * [ -(2 dm w_bar - dm w_prev)/(1 + dm x)
  //                  + 2 dm w_bar/(2 dm x + 1) + dm0 A0/(1 + dm0 x) ]
  FactoredRational d;
  d.Add(FactorTermBuilder(-0.5 * (2.0 * dm * p.w_bar - dm * p.w_prev))
            .Times(0.0, dm)
            .Over(1.0, 2.0 * dm)
            .Over(1.0, dm0)
            .Over(1.0, dm)
            .Build());
  d.Add(FactorTermBuilder(0.5 * 2.0 * dm * p.w_bar)
            .Times(0.0, dm)
            .Over(1.0, 2.0 * dm)
            .Over(1.0, 2.0 * dm)
            .Over(1.0, dm0)
            .Build());
  d.Add(FactorTermBuilder(0.5 * dm0 * p.a0)
            .Times(0.0, dm)
            .Over(1.0, 2.0 * dm)
            .Over(1.0, dm0)
            .Over(1.0, dm0)
            .Build());
  return d;
}

FactoredRational PhiTransform(double u, double v, double vartheta, double theta,
                              const LstParams& p) {
  p.Validate();
  const double dm = p.delta_mean;
  const double dm0 = p.delta0_mean;
  const double uv = u + v;
  const double shift = vartheta + theta;

  FactoredRational phi;
  // psi0 - psi1 = gamma_init(v, theta) - gamma_init(v, theta + x)
  //             = (1/a) dm0 x / (a + dm0 x)
  const double a = 1.0 + dm0 * (DriftExponent(p.sigma, p.a0, v) + theta);
  phi.Add(FactorTermBuilder(1.0 / a).Times(0.0, dm0).Over(a, dm0).Build());

  // avg^2 - 2 avg = -(2 Dbar + 1) / (1 + Dbar)^2, so the second part is
  // + gamma0 phi (Gamma0 - Gamma1) (1 + Dbar)^2 / (2 (2 Dbar + 1)).
  const double b = 1.0 + dm * (DriftExponent(p.sigma, p.w_exit, v) + theta);
  const double avg = 1.0 + dm * (DriftExponent(p.sigma, p.w_bar, uv) + shift);
  phi.Add(FactorTermBuilder(0.5 / b)
              .Over(1.0 + dm0 * (DriftExponent(p.sigma, p.a0, uv) + shift), dm0)
              .Over(1.0 + dm * (DriftExponent(p.sigma, p.w_prev, uv) + shift), dm)
              .Times(0.0, dm)
              .Over(b, dm)
              .Times(avg, dm)
              .Times(avg, dm)
              .Over(2.0 * avg - 1.0, 2.0 * dm)
              .Build());
  return phi;
}

double PhiNu(const TransformContext& ctx, const LstParams& p) {
  Require(ctx.u >= 0.0 && ctx.v >= 0.0 && ctx.vartheta >= 0.0 && ctx.theta >= 0.0,
          "transform variables must be >= 0");
  Require(ctx.h >= 0.0, "h must be >= 0");
  return LcInverseRational(PhiTransform(ctx.u, ctx.v, ctx.vartheta, ctx.theta, p), ctx.h);
}

double PhiDerivativeAtOrigin(MomentVariable var, const LstParams& p, double h) {
  const auto phi = [&](double s) {
    double u = 0.0, v = 0.0, vartheta = 0.0, theta = 0.0;
    switch (var) {
      case MomentVariable::kU:
        u = s;
        break;
      case MomentVariable::kV:
        v = s;
        break;
      case MomentVariable::kVartheta:
        vartheta = s;
        break;
      case MomentVariable::kTheta:
        theta = s;
        break;
    }
    return LcInverseRational(PhiTransform(u, v, vartheta, theta, p), h);
  };
  const auto central = [&](double step) { return (phi(step) - phi(-step)) / (2.0 * step); };
  return (4.0 * central(kFineStep) - central(kCoarseStep)) / 3.0;
}

RestrictedMoments ComputeRestrictedMoments(const LstParams& p, double h) {
  Require(h > 0.0, "moments need h > 0");
  RestrictedMoments m;
  m.h = h;
  m.a_prev = LcInverseRational(DduPsiRational(p), h);
  m.a_prev_fd = -PhiDerivativeAtOrigin(MomentVariable::kU, p, h);
  m.tau_prev = -PhiDerivativeAtOrigin(MomentVariable::kVartheta, p, h);
  m.a_exit = -PhiDerivativeAtOrigin(MomentVariable::kV, p, h);
  m.tau_exit = -PhiDerivativeAtOrigin(MomentVariable::kTheta, p, h);
  m.nu = std::abs(m.tau_exit) / p.delta_mean;
  return m;
}

}  // namespace sbfp::transform
