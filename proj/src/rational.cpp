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

#include "sbfp/rational.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace sbfp::transform {
namespace {

using Series = std::vector<Complex>;

// Cluster radius for the repeated-pole hypothesis on companion roots. A true
// m-fold root splits into a ring of radius ~eps^(1/m), well inside this.
constexpr double kClusterRadius = 1e-3;
// Reconstruction mismatch tolerated when validating a partial-fraction set.
constexpr double kReconstructionTolerance = 1e-9;
// Zero/pole pairs this close are cancelled before expansion.
constexpr double kCancelTolerance = 1e-12;
// Factored poles within this relative distance are inverted as one cluster.
constexpr double kFactorClusterRadius = 1e-3;
// Taylor terms kept per non-confluent cluster; the neglected remainder is of
// order (|d| h)^n / n!.
constexpr int kClusterSeriesTerms = 30;

double Scale(Complex r) { return std::max(1.0, std::abs(r)); }

Series SeriesMul(const Series& a, const Series& b, int order) {
  Series out(order, Complex{});
  for (int i = 0; i < order && i < static_cast<int>(a.size()); ++i) {
    for (int j = 0; i + j < order && j < static_cast<int>(b.size()); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

Series SeriesDiv(const Series& n, const Series& d, int order) {
  Series out(order, Complex{});
  for (int k = 0; k < order; ++k) {
    Complex acc = k < static_cast<int>(n.size()) ? n[k] : Complex{};
    for (int j = 1; j <= k && j < static_cast<int>(d.size()); ++j) acc -= d[j] * out[k - j];
    out[k] = acc / d[0];
  }
  return out;
}

// Coefficients of (c0 + t)^power, truncated.
Series LinearPower(Complex c0, int power, int order) {
  Series out(order, Complex{});
  out[0] = 1.0;
  for (int p = 0; p < power; ++p) out = SeriesMul(out, Series{c0, 1.0}, order);
  return out;
}

// Coefficients of c(at + t) in powers of t, by repeated synthetic division.
Series TaylorShift(std::span<const double> c, Complex at, int order) {
  Series work(c.begin(), c.end());
  Series out(order, Complex{});
  int len = static_cast<int>(work.size());
  for (int k = 0; k < order && len > 0; ++k, --len) {
    Complex acc{};
    for (int i = len - 1; i >= 0; --i) {
      const Complex next = work[i] + acc * at;
      work[i] = acc;
      acc = next;
    }
    out[k] = acc;
  }
  return out;
}

using NumeratorSeries = std::function<Series(Complex at, int order)>;

// Inverse Laplace transform of N(x) / prod_i (x - r_i)^{m_i}; the residue set
// c[i][k-1] multiplies 1/(x - r_i)^k.
ExpSum PartialFractionInverse(const std::vector<Pole>& poles, const NumeratorSeries& numerator,
                              std::vector<Series>* residues = nullptr) {
  std::vector<ExpTerm> terms;
  if (residues) residues->clear();
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const int m = poles[i].multiplicity;
    const Complex r = poles[i].root;
    Series q{1.0};
    q.resize(m, Complex{});
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (j == i) continue;
      q = SeriesMul(q, LinearPower(r - poles[j].root, poles[j].multiplicity, m), m);
    }
    const Series s = SeriesDiv(numerator(r, m), q, m);
    ExpTerm term{r, Series(m)};
    Series c(m);
    double factorial = 1.0;
    for (int j = 0; j < m; ++j) {
      if (j > 0) factorial *= j;
      c[j] = s[m - 1 - j];
      term.poly[j] = c[j] / factorial;
    }
    if (residues) residues->push_back(std::move(c));
    terms.push_back(std::move(term));
  }
  return ExpSum(std::move(terms));
}

std::vector<Pole> Cluster(std::vector<Complex> roots, double radius) {
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(roots[i] - roots[j]) <= radius * Scale(roots[i])) {
        parent[find(j)] = find(i);
      }
    }
  }
  std::vector<Pole> poles;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    auto it = std::find(owner.begin(), owner.end(), root);
    if (it == owner.end()) {
      owner.push_back(root);
      poles.push_back(Pole{roots[i], 1});
    } else {
      Pole& p = poles[it - owner.begin()];
      p.root = (p.root * static_cast<double>(p.multiplicity) + roots[i]) /
               static_cast<double>(p.multiplicity + 1);
      ++p.multiplicity;
    }
  }
  return poles;
}

std::vector<Pole> MergeReal(std::vector<double> roots) {
  std::sort(roots.begin(), roots.end());
  std::vector<Pole> out;
  std::size_t i = 0;
  while (i < roots.size()) {
    std::size_t j = i + 1;
    double sum = roots[i];
    while (j < roots.size() &&
           std::abs(roots[j] - roots[i]) <= kRootMergeTolerance * Scale(roots[i])) {
      sum += roots[j];
      ++j;
    }
    out.push_back(Pole{sum / static_cast<double>(j - i), static_cast<int>(j - i)});
    i = j;
  }
  return out;
}

// Zeros and poles of scale * prod(x - z) / (x * prod(x - p)) after cancellation.
struct DividedTerm {
  double scale;
  std::vector<double> zeros;
  std::vector<double> poles;
};

DividedTerm DivideByX(const FactorTerm& t) {
  std::vector<double> zeros = t.zeros;
  std::vector<double> poles = t.poles;
  auto origin = std::find(zeros.begin(), zeros.end(), 0.0);
  if (origin != zeros.end()) {
    zeros.erase(origin);
  } else {
    poles.push_back(0.0);
  }
  for (auto z = zeros.begin(); z != zeros.end();) {
    auto p = std::find_if(poles.begin(), poles.end(), [&](double pole) {
      return std::abs(pole - *z) <= kCancelTolerance * Scale(pole);
    });
    if (p != poles.end()) {
      poles.erase(p);
      z = zeros.erase(z);
    } else {
      ++z;
    }
  }
  std::sort(poles.begin(), poles.end());
  return DividedTerm{t.scale, std::move(zeros), std::move(poles)};
}

// Groups sorted real poles whose neighbours lie within kFactorClusterRadius
// (relative to the pole magnitude).
std::vector<std::vector<double>> ClusterSorted(const std::vector<double>& poles) {
  std::vector<std::vector<double>> clusters;
  for (double p : poles) {
    if (!clusters.empty()) {
      const double prev = clusters.back().back();
      if (p == prev ||
          std::abs(p - prev) <= kFactorClusterRadius * std::max(std::abs(p), std::abs(prev))) {
        clusters.back().push_back(p);
        continue;
      }
    }
    clusters.push_back({p});
  }
  return clusters;
}

// Contribution of one pole cluster {c + d_i} to L^{-1}{N(x) / (prod_i (x - c - d_i) R(x))}:
// the divided difference of G(x) = exp(x h) N(x) / R(x) over the cluster. With
// M(t) = N(c + t) / R(c + t) = sum m_l t^l and H_k the complete homogeneous
// symmetric polynomial in d,
//
//   G[c + d_1, ..., c + d_m] = exp(c h) sum_a h^a / a! sum_l m_l H_{a + l - m + 1}(d),
//
// exact for coincident poles and free of the 1/|d|^(m-1) residues that a
// split partial-fraction expansion would produce.
ExpTerm ClusterInverse(const std::vector<double>& cluster, const DividedTerm& term,
                       const std::vector<double>& others) {
  const int m = static_cast<int>(cluster.size());
  double center = 0.0;
  for (double p : cluster) center += p;
  center /= m;
  std::vector<double> d;
  bool confluent = true;
  for (double p : cluster) {
    d.push_back(p - center);
    confluent = confluent && d.back() == 0.0;
  }
  const int extra = confluent ? 0 : kClusterSeriesTerms;
  const int length = m + extra;  // m_l for l < length

  Series num(length, Complex{});
  num[0] = term.scale;
  for (double z : term.zeros) num = SeriesMul(num, Series{center - z, 1.0}, length);
  Series den(length, Complex{});
  den[0] = 1.0;
  for (double q : others) den = SeriesMul(den, Series{center - q, 1.0}, length);
  const Series mseries = SeriesDiv(num, den, length);

  // H_k(d) for k <= extra.
  std::vector<double> hsym(extra + 1, 0.0);
  hsym[0] = 1.0;
  for (double di : d) {
    for (int k = 1; k <= extra; ++k) hsym[k] += di * hsym[k - 1];
  }

  ExpTerm out{center, Series(m + extra, Complex{})};
  double factorial = 1.0;
  for (int a = 0; a < m + extra; ++a) {
    if (a > 0) factorial *= a;
    Complex acc{};
    for (int l = std::max(0, m - 1 - a); l < length; ++l) {
      const int k = a + l - m + 1;
      if (k > extra) break;
      acc += mseries[l] * hsym[k];
    }
    out.poly[a] = acc / factorial;
  }
  while (out.poly.size() > 1 && out.poly.back() == Complex{}) out.poly.pop_back();
  return out;
}

ExpSum InvertTerm(const FactorTerm& t) {
  if (t.scale == 0.0) return {};
  const DividedTerm d = DivideByX(t);
  if (d.zeros.size() >= d.poles.size()) {
    Fail(ErrorCode::kInvalidArgument, "transform is not proper");
  }
  std::vector<ExpTerm> terms;
  const auto clusters = ClusterSorted(d.poles);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    std::vector<double> others;
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      if (j != i) others.insert(others.end(), clusters[j].begin(), clusters[j].end());
    }
    terms.push_back(ClusterInverse(clusters[i], d, others));
  }
  return ExpSum(std::move(terms));
}

}  // namespace

namespace poly {

Complex EvalComplex(std::span<const double> c, Complex x) { return Eval<Complex>(c, x); }

std::vector<double> Multiply(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> Add(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

std::vector<double> Derivative(std::span<const double> c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> out(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) out[i - 1] = c[i] * static_cast<double>(i);
  return out;
}

void Trim(std::vector<double>& c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
}

std::vector<Complex> Roots(std::span<const double> c) {
  std::vector<double> coeffs(c.begin(), c.end());
  Trim(coeffs);
  Require(coeffs.size() >= 2, "polynomial root finding needs degree >= 1");
  const int n = static_cast<int>(coeffs.size()) - 1;
  const double lead = coeffs.back();

  std::vector<Complex> roots;
  if (n == 1) {
    roots.push_back(-coeffs[0] / lead);
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -coeffs[i] / lead;
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    for (int i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()(i));
  }

  const std::vector<double> deriv = Derivative(coeffs);
  for (Complex& r : roots) {
    for (int iter = 0; iter < 5; ++iter) {
      const Complex value = EvalComplex(coeffs, r);
      const Complex slope = EvalComplex(deriv, r);
      if (std::abs(slope) == 0.0 || std::abs(value) == 0.0) break;
      const Complex next = r - value / slope;
      if (!(std::abs(EvalComplex(coeffs, next)) < std::abs(value))) break;
      r = next;
    }
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

}  // namespace poly

RationalFn::RationalFn(std::vector<double> numerator, std::vector<double> denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  for (double c : num_) Require(std::isfinite(c), "numerator coefficients must be finite");
  for (double c : den_) Require(std::isfinite(c), "denominator coefficients must be finite");
  poly::Trim(num_);
  poly::Trim(den_);
  Require(!den_.empty(), "denominator must be non-zero");
  if (num_.empty()) num_.push_back(0.0);
  const double lead = den_.back();
  for (double& c : num_) c /= lead;
  for (double& c : den_) c /= lead;
}

double ExpSum::operator()(double h) const {
  double sum = 0.0;
  for (const ExpTerm& t : terms_) {
    Complex p{};
    for (auto it = t.poly.rbegin(); it != t.poly.rend(); ++it) p = p * h + *it;
    sum += (std::exp(t.rate * h) * p).real();
  }
  return sum;
}

ExpSum ExpSum::Derivative() const {
  std::vector<ExpTerm> out;
  out.reserve(terms_.size());
  for (const ExpTerm& t : terms_) {
    ExpTerm d{t.rate, std::vector<Complex>(t.poly.size(), Complex{})};
    for (std::size_t j = 0; j < t.poly.size(); ++j) {
      d.poly[j] += t.rate * t.poly[j];
      if (j + 1 < t.poly.size()) d.poly[j] += static_cast<double>(j + 1) * t.poly[j + 1];
    }
    out.push_back(std::move(d));
  }
  return ExpSum(std::move(out));
}

ExpSum& ExpSum::operator+=(const ExpSum& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

ExpSum InvertLc(const RationalFn& g, InversionInfo* info) {
  Require(g.proper(), "transform must be proper");
  std::vector<double> num = g.numerator();
  std::vector<double> den = g.denominator();

  double num_scale = 0.0;
  for (double c : num) num_scale = std::max(num_scale, std::abs(c));
  if (num_scale == 0.0) return {};
  // Division by x: cancel against a numerator root at the origin if present.
  if (std::abs(num[0]) <= 1e-14 * num_scale) {
    num.erase(num.begin());
  } else {
    den.insert(den.begin(), 0.0);
  }
  poly::Trim(num);
  if (num.empty()) return {};

  const std::vector<Complex> roots = poly::Roots(den);
  double rho = 1.0;
  for (Complex r : roots) rho = std::max(rho, std::abs(r));

  const auto numerator = [&num](Complex at, int n) { return TaylorShift(num, at, n); };
  const std::vector<double> probes{0.37 * rho, 1.3 * rho, 3.1 * rho};

  std::vector<std::vector<Pole>> candidates;
  candidates.push_back(Cluster(roots, kClusterRadius));
  std::vector<Pole> strict = Cluster(roots, kRootMergeTolerance);
  if (strict.size() != candidates.front().size()) candidates.push_back(std::move(strict));

  double best_condition = 0.0;
  for (const auto& poles : candidates) {
    std::vector<Series> residues;
    ExpSum f = PartialFractionInverse(poles, numerator, &residues);

    double mismatch = 0.0;
    double magnitude = 0.0;
    for (double x : probes) {
      const Complex exact = poly::EvalComplex(num, x) / poly::EvalComplex(den, x);
      Complex approx{};
      for (std::size_t i = 0; i < poles.size(); ++i) {
        Complex power = 1.0;
        for (const Complex& c : residues[i]) {
          power *= (x - poles[i].root);
          approx += c / power;
        }
      }
      mismatch = std::max(mismatch, std::abs(approx - exact) / std::max(std::abs(exact), 1e-300));
      magnitude = std::max(magnitude, std::abs(exact) * x);
    }
    double weight = 0.0;
    for (const Series& c : residues) {
      double rk = 1.0;
      for (const Complex& ck : c) {
        weight += std::abs(ck) * rk;
        rk *= rho;
      }
    }
    const double condition = weight / std::max(magnitude, 1e-300);
    best_condition = condition;
    if (mismatch <= kReconstructionTolerance && condition <= kMaxInversionCondition) {
      if (info) *info = InversionInfo{poles, condition};
      return f;
    }
  }
  Fail(ErrorCode::kIllConditioned,
       "clustered poles (condition estimate " + std::to_string(best_condition) + ")");
}

double LcInverseRational(const RationalFn& g, double h) {
  Require(h >= 0.0, "h must be >= 0");
  return InvertLc(g)(h);
}

FactorTermBuilder& FactorTermBuilder::Times(double a, double b) {
  if (b == 0.0) {
    term_.scale *= a;
  } else {
    term_.scale *= b;
    term_.zeros.push_back(-a / b);
  }
  return *this;
}

FactorTermBuilder& FactorTermBuilder::Over(double a, double b) {
  if (b == 0.0) {
    Require(a != 0.0, "division by a zero constant factor");
    term_.scale /= a;
  } else {
    term_.scale /= b;
    term_.poles.push_back(-a / b);
  }
  return *this;
}

FactoredRational& FactoredRational::Add(FactorTerm term) {
  Require(std::isfinite(term.scale), "factor scale must be finite");
  if (term.scale != 0.0) terms_.push_back(std::move(term));
  return *this;
}

FactoredRational& FactoredRational::operator+=(const FactoredRational& other) {
  for (const FactorTerm& t : other.terms_) Add(t);
  return *this;
}

RationalFn FactoredRational::Expand() const {
  std::vector<Pole> lcm;
  std::vector<std::vector<Pole>> grouped;
  for (const FactorTerm& t : terms_) {
    grouped.push_back(MergeReal(t.poles));
    for (const Pole& p : grouped.back()) {
      auto it = std::find_if(lcm.begin(), lcm.end(), [&](const Pole& q) {
        return std::abs(q.root - p.root) <= kRootMergeTolerance * Scale(q.root);
      });
      if (it == lcm.end()) {
        lcm.push_back(p);
      } else {
        it->multiplicity = std::max(it->multiplicity, p.multiplicity);
      }
    }
  }

  std::vector<double> den{1.0};
  for (const Pole& p : lcm) {
    for (int k = 0; k < p.multiplicity; ++k) {
      den = poly::Multiply(den, std::vector<double>{-p.root.real(), 1.0});
    }
  }

  std::vector<double> num{0.0};
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    std::vector<double> part{terms_[i].scale};
    for (double z : terms_[i].zeros) part = poly::Multiply(part, std::vector<double>{-z, 1.0});
    for (const Pole& p : lcm) {
      int have = 0;
      for (const Pole& q : grouped[i]) {
        if (std::abs(q.root - p.root) <= kRootMergeTolerance * Scale(p.root)) {
          have = q.multiplicity;
        }
      }
      for (int k = have; k < p.multiplicity; ++k) {
        part = poly::Multiply(part, std::vector<double>{-p.root.real(), 1.0});
      }
    }
    num = poly::Add(num, part);
  }
  return RationalFn(std::move(num), std::move(den));
}

ExpSum InvertLc(const FactoredRational& g) {
  ExpSum out;
  for (const FactorTerm& t : g.terms()) out += InvertTerm(t);
  return out;
}

double LcInverseRational(const FactoredRational& g, double h) {
  Require(h >= 0.0, "h must be >= 0");
  return InvertLc(g)(h);
}

}  // namespace sbfp::transform
