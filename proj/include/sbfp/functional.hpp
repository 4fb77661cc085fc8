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

// The turning-point functional Phi(u, v, vartheta, theta; h) and its moments.
//
// In the x domain the functional is
//
//   (psi0 - psi1) - gamma0 * phi * (Gamma0 - Gamma1) / (2 (avg^2 - 2 avg))
//
// with psi0 = gamma_init(v, theta), psi1 = gamma_init(v, theta + x),
// gamma0 = gamma_init(u+v, s), phi = gamma_prev(u+v, s), avg = gamma_avg(u+v, s),
// Gamma0 = gamma_exit(v, theta), Gamma1 = gamma_exit(v, theta + x) and
// s = vartheta + theta + x. Every factor is a reciprocal affine form in x, so the
// transform is a sum of linear-factor products and inverts exactly.

#ifndef SBFP_FUNCTIONAL_HPP_
#define SBFP_FUNCTIONAL_HPP_

#include "sbfp/lst.hpp"
#include "sbfp/rational.hpp"

namespace sbfp::transform {

struct TransformContext {
  double u = 0.0;
  double v = 0.0;
  double vartheta = 0.0;
  double theta = 0.0;
  double h = 0.0;
};

// Psi(., u) from the G/D closed form.
FactoredRational PsiRational(double u, const LstParams& p);

// -dPsi/du at u = 0, with dD/du = dm w_bar, dD0/du = dm0 A0, dD2/du = dm w_prev.
FactoredRational DduPsiRational(const LstParams& p);

// Functional transform in x assembled from the gamma blocks. Accepts any sign
// of the transform variables (finite-difference stencils straddle zero).
FactoredRational PhiTransform(double u, double v, double vartheta, double theta,
                              const LstParams& p);

// Phi at horizon ctx.h; all variables must be >= 0.
double PhiNu(const TransformContext& ctx, const LstParams& p);

// Restricted (indicator-weighted, not conditional) moments at horizon h.
struct RestrictedMoments {
  double h = 0.0;
  double a_prev = 0.0;      // exact rational route
  double a_prev_fd = 0.0;   // Richardson central differences
  double tau_prev = 0.0;
  double a_exit = 0.0;
  double tau_exit = 0.0;
  double nu = 0.0;          // |E[tau_nu]| / delta_mean
};

RestrictedMoments ComputeRestrictedMoments(const LstParams& p, double h);

// Richardson-extrapolated central difference of phi along one variable at the
// origin, steps 1e-4 and 5e-5.
enum class MomentVariable { kU, kV, kVartheta, kTheta };
double PhiDerivativeAtOrigin(MomentVariable var, const LstParams& p, double h);

}  // namespace sbfp::transform

#endif  // SBFP_FUNCTIONAL_HPP_
