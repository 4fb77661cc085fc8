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

// Exact Laplace-Carson inversion of rational transforms.
//
// The Laplace-Carson transform of f is g(x) = x * int_0^inf e^{-xh} f(h) dh,
// so f = L^{-1}{g(x)/x}. For rational g the inverse is a finite sum of
// exponential-polynomial terms obtained from the partial-fraction expansion of
// g(x)/x. Two representations are supported:
//
//  * RationalFn: plain coefficient lists; poles come from companion-matrix
//    eigenvalues, so clustered poles are only as accurate as the coefficients.
//  * FactoredRational: a sum of products of linear factors with known roots.
//    Every memoryless-case transform has this shape, and inverting it keeps the
//    poles exact even when two of them nearly coincide.

#ifndef SBFP_RATIONAL_HPP_
#define SBFP_RATIONAL_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "sbfp/error.hpp"

namespace sbfp::transform {

using Complex = std::complex<double>;

// Poles closer than this (relative to max(1, |root|)) are one repeated pole.
inline constexpr double kRootMergeTolerance = 1e-8;
// Above this condition estimate the companion route gives up.
inline constexpr double kMaxInversionCondition = 1e8;

namespace poly {

// Coefficients are in ascending powers.
template <class T>
T Eval(std::span<const double> c, const T& x) {
  T acc(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Complex EvalComplex(std::span<const double> c, Complex x);
std::vector<double> Multiply(std::span<const double> a, std::span<const double> b);
std::vector<double> Add(std::span<const double> a, std::span<const double> b);
std::vector<double> Derivative(std::span<const double> c);
void Trim(std::vector<double>& c);
// Roots of a polynomial of degree >= 1 (eigenvalues of the companion matrix,
// Newton-polished where that reduces the residual).
std::vector<Complex> Roots(std::span<const double> c);

}  // namespace poly

class RationalFn {
 public:
  // The denominator is normalized to a unit leading coefficient.
  RationalFn(std::vector<double> numerator, std::vector<double> denominator);

  const std::vector<double>& numerator() const { return num_; }
  const std::vector<double>& denominator() const { return den_; }
  int numerator_degree() const { return static_cast<int>(num_.size()) - 1; }
  int denominator_degree() const { return static_cast<int>(den_.size()) - 1; }
  bool proper() const { return numerator_degree() <= denominator_degree(); }

  template <class T>
  T operator()(const T& x) const {
    const T d = poly::Eval<T>(den_, x);
    using std::abs;
    if (abs(d) < 1e-300) Fail(ErrorCode::kPoleHit, "rational denominator vanishes");
    return poly::Eval<T>(num_, x) / d;
  }

 private:
  std::vector<double> num_;
  std::vector<double> den_;
};

// f(h) = Re sum_k exp(rate_k h) * sum_j poly_k[j] h^j.
struct ExpTerm {
  Complex rate;
  std::vector<Complex> poly;
};

class ExpSum {
 public:
  ExpSum() = default;
  explicit ExpSum(std::vector<ExpTerm> terms) : terms_(std::move(terms)) {}

  double operator()(double h) const;
  ExpSum Derivative() const;
  ExpSum& operator+=(const ExpSum& other);

  const std::vector<ExpTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<ExpTerm> terms_;
};

struct Pole {
  Complex root;
  int multiplicity = 1;
};

struct InversionInfo {
  std::vector<Pole> poles;
  double condition = 0.0;
};

// Companion-matrix route. Throws kIllConditioned when clustered poles cannot be
// resolved; callers should fall back to LcInverseNumeric.
ExpSum InvertLc(const RationalFn& g, InversionInfo* info = nullptr);
double LcInverseRational(const RationalFn& g, double h);

// scale * prod (x - zeros) / prod (x - poles)
struct FactorTerm {
  double scale = 1.0;
  std::vector<double> zeros;
  std::vector<double> poles;
};

// Accumulates affine factors (a + b x) into a FactorTerm.
class FactorTermBuilder {
 public:
  explicit FactorTermBuilder(double scale = 1.0) { term_.scale = scale; }
  FactorTermBuilder& Times(double a, double b);
  FactorTermBuilder& Over(double a, double b);
  FactorTerm Build() const { return term_; }

 private:
  FactorTerm term_;
};

class FactoredRational {
 public:
  FactoredRational() = default;

  // Terms with zero scale are dropped.
  FactoredRational& Add(FactorTerm term);
  FactoredRational& operator+=(const FactoredRational& other);

  const std::vector<FactorTerm>& terms() const { return terms_; }

  template <class T>
  T operator()(const T& x) const {
    using std::abs;
    T sum(0);
    for (const FactorTerm& t : terms_) {
      T value(t.scale);
      for (double z : t.zeros) value *= (x - z);
      for (double p : t.poles) {
        const T gap = x - p;
        if (abs(gap) < 1e-10 * std::max(1.0, std::abs(p))) {
          Fail(ErrorCode::kPoleHit, "transform evaluated at a pole");
        }
        value /= gap;
      }
      sum += value;
    }
    return sum;
  }

  // Single coefficient-form rational over the least common denominator.
  RationalFn Expand() const;

 private:
  std::vector<FactorTerm> terms_;
};

ExpSum InvertLc(const FactoredRational& g);
double LcInverseRational(const FactoredRational& g, double h);

}  // namespace sbfp::transform

#endif  // SBFP_RATIONAL_HPP_
