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

#include "sbfp/lst.hpp"

#include <algorithm>
#include <cmath>

namespace sbfp::transform {

void LstParams::Validate() const {
  Require(std::isfinite(delta_mean) && delta_mean > 0.0, "delta_mean must be > 0");
  Require(std::isfinite(delta0_mean) && delta0_mean >= 0.0, "delta0_mean must be >= 0");
  Require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be >= 0");
  Require(std::isfinite(a0) && std::isfinite(w_bar) && std::isfinite(w_prev) &&
              std::isfinite(w_exit),
          "drift parameters must be finite");
}

LstParams LstParams::FromProcess(const process::ProcessParams& params,
                                 const process::ObservationModel& obs, std::size_t k) {
  Require(k >= 2, "need at least two schedule steps");
  LstParams p;
  p.delta_mean = obs.mean_interarrival();
  p.delta0_mean = obs.mean_initial_delay();
  p.sigma = params.sigma;
  p.a0 = params.a0;
  p.w_bar = params.drift.mean(k);
  p.w_prev = params.drift.at(k - 1);
  p.w_exit = params.drift.at(k);
  p.Validate();
  return p;
}

double DeltaLst(double theta, double delta_mean) {
  Require(theta >= 0.0, "theta must be >= 0");
  return 1.0 / (1.0 + delta_mean * theta);
}

double GammaFn(GammaKind kind, double omega, double x, const LstParams& p) {
  return GammaValue(kind, omega, x, p);
}

PsiComponents ComputePsiComponents(double x, double u, const LstParams& p) {
  PsiComponents c;
  c.g0 = p.delta0_mean * x / (p.delta0_mean * x + 1.0);
  c.g1 = p.delta_mean * x / (p.delta_mean * x + 1.0);
  c.d = p.delta_mean * (DriftExponent(p.sigma, p.w_bar, u) + x);
  c.d0 = p.delta0_mean * (DriftExponent(p.sigma, p.a0, u) + x);
  c.d2 = p.delta_mean * (DriftExponent(p.sigma, p.w_prev, u) + x);
  return c;
}

PsiEvaluation PsiTransform(double x, double u, const LstParams& p) {
  p.Validate();
  Require(x > 0.0, "psi is evaluated for x > 0");
  Require(u >= 0.0, "u must be >= 0");
  PsiEvaluation e;
  e.value = PsiFactoredForm(x, u, p);
  e.gamma_form = PsiGammaForm(x, u, p);
  e.components = ComputePsiComponents(x, u, p);
  return e;
}

}  // namespace sbfp::transform
