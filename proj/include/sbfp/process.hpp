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

// Simulation of the shifted Brownian fluctuation process: a Brownian motion
// whose drift slope changes from one observation to the next, observed only at
// the epochs of a renewal process. The simulator locates the first observed
// turning point and estimates the analytic functionals by Monte Carlo.

#ifndef SBFP_PROCESS_HPP_
#define SBFP_PROCESS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sbfp/rng.hpp"

namespace sbfp::process {

inline constexpr std::size_t kDefaultMaxSteps = 10'000;

enum class DriftExtension { kHoldLast, kCycle };
enum class Shape { kConcave, kConvex };
enum class ThresholdMode { kZeroSign, kPaperLiteral };

// Per-step drift slopes w_1, w_2, ... The initial point is carried by A0, so
// there is no w_0 entry.
class DriftSchedule {
 public:
  explicit DriftSchedule(std::vector<double> values,
                         DriftExtension extension = DriftExtension::kHoldLast);

  // Slope for step k >= 1.
  double at(std::size_t k) const;
  // Average of w_1..w_k.
  double mean(std::size_t k) const;
  double mean() const { return mean(values_.size()); }

  std::span<const double> values() const { return values_; }
  DriftExtension extension() const { return extension_; }

 private:
  std::vector<double> values_;
  DriftExtension extension_;
};

struct ProcessParams {
  double sigma = 1.0;
  double a0 = 0.0;
  DriftSchedule drift{{0.0}};
  Shape shape = Shape::kConcave;
  ThresholdMode threshold_mode = ThresholdMode::kZeroSign;

  void Validate() const;
};

struct Exponential {
  double mean;
};
struct Deterministic {
  double step;
};
struct ZeroDelay {};

using InterarrivalLaw = std::variant<Exponential, Deterministic>;
using InitialDelayLaw = std::variant<Exponential, ZeroDelay>;

class ObservationModel {
 public:
  ObservationModel(InterarrivalLaw interarrival, InitialDelayLaw initial_delay);

  static ObservationModel Memoryless(double delta_mean, double delta0_mean);
  static ObservationModel Regular(double step);

  const InterarrivalLaw& interarrival() const { return interarrival_; }
  const InitialDelayLaw& initial_delay() const { return initial_delay_; }

  double mean_interarrival() const;
  double mean_initial_delay() const;
  // Both laws exponential, so the Laplace-Stieltjes transforms are rational.
  bool memoryless() const;

 private:
  InterarrivalLaw interarrival_;
  InitialDelayLaw initial_delay_;
};

double SampleInterarrival(const ObservationModel& model, PhiloxStream& rng);
double SampleInitialDelay(const ObservationModel& model, PhiloxStream& rng);

struct PathEntry {
  std::size_t k = 0;
  double tau = 0.0;
  double delta = 0.0;    // tau_k - tau_{k-1}, with tau_{-1} = 0
  double a = 0.0;        // position A_k
  double w_inc = 0.0;    // increment W_k = A_k - A_{k-1}; equals A0 at k = 0
  double drift = 0.0;    // slope w_k used for the step (0 at k = 0)
};

struct SbfpPath {
  std::vector<PathEntry> entries;
  bool truncated = false;
};

struct ExitRecord {
  std::size_t nu = 0;
  double tau_prev = 0.0;
  double a_prev = 0.0;
  double tau_exit = 0.0;
  double a_exit = 0.0;
  bool condition_held = false;
};

struct PathOutcome {
  SbfpPath path;
  std::optional<ExitRecord> exit;
};

// First index at which the monotone increment condition flips. Ties with the
// threshold never trigger an exit. Returns nullopt when the path has not
// exited yet.
std::optional<ExitRecord> DetectExit(const SbfpPath& path, Shape shape,
                                     ThresholdMode mode);

// Runs one replication on stream `stream` of `seed`; never throws on
// truncation.
PathOutcome TrySimulatePath(const ProcessParams& params,
                            const ObservationModel& obs, std::uint64_t seed,
                            std::size_t max_steps = kDefaultMaxSteps,
                            std::uint64_t stream = 0);

// As TrySimulatePath, but a path that reaches max_steps without exiting
// raises ErrorCode::kNoExitWithinCap.
PathOutcome SimulatePath(const ProcessParams& params,
                         const ObservationModel& obs, std::uint64_t seed,
                         std::size_t max_steps = kDefaultMaxSteps,
                         std::uint64_t stream = 0);

// Fixed-length path with no exit detection (synthetic series generation).
SbfpPath GeneratePath(const ProcessParams& params, const ObservationModel& obs,
                      std::uint64_t seed, std::size_t steps,
                      std::uint64_t stream = 0);

struct TransformArgs {
  double u = 0.0;        // dual of A_{nu-1}
  double v = 0.0;        // dual of A_nu
  double vartheta = 0.0; // dual of tau_{nu-1}
  double theta = 0.0;    // dual of tau_nu
};

struct McConfig {
  std::size_t reps = 10'000;
  std::uint64_t seed = 1;
  std::size_t max_steps = kDefaultMaxSteps;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

struct McSummary {
  std::size_t reps = 0;
  std::size_t exits = 0;
  double truncation_rate = 0.0;
  // Means over exited paths.
  Estimate a_prev;
  Estimate tau_prev;
  Estimate a_exit;
  Estimate tau_exit;
  Estimate nu;
  // E[tau_nu] / delta_mean, the ratio-of-expectations reading of E[nu].
  Estimate nu_from_tau;
  // Average of exp(-u A_{nu-1} - v A_nu - vartheta tau_{nu-1} - theta tau_nu)
  // times the exit indicator, over all replications.
  Estimate functional;
  TransformArgs args;
};

// Exit records for replications 0..reps-1 (nullopt where truncated). Stream i
// of cfg.seed drives replication i, so the result is independent of threads.
std::vector<std::optional<ExitRecord>> CollectExits(const ProcessParams& params,
                                                    const ObservationModel& obs,
                                                    const McConfig& cfg);

McSummary SummarizeExits(std::span<const std::optional<ExitRecord>> exits,
                         const ObservationModel& obs, const TransformArgs& args);

McSummary McEstimate(const ProcessParams& params, const ObservationModel& obs,
                     const TransformArgs& args, const McConfig& cfg);

}  // namespace sbfp::process

#endif  // SBFP_PROCESS_HPP_
