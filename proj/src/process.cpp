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

#include "sbfp/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "sbfp/error.hpp"

namespace sbfp::process {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double DrawExponential(double mean, PhiloxStream& rng) {
  std::exponential_distribution<double> law(1.0 / mean);
  double draw = 0.0;
  do {
    draw = law(rng);
  } while (!(draw > 0.0));
  return draw;
}

enum class StepVerdict { kMonotone, kTie, kExit };

StepVerdict Classify(Shape shape, ThresholdMode mode, const PathEntry& entry) {
  const double threshold = mode == ThresholdMode::kZeroSign ? 0.0 : entry.drift;
  const double w = entry.w_inc;
  if (w == threshold) return StepVerdict::kTie;
  const bool above = w > threshold;
  if (shape == Shape::kConcave) {
    return above ? StepVerdict::kMonotone : StepVerdict::kExit;
  }
  return above ? StepVerdict::kExit : StepVerdict::kMonotone;
}

ExitRecord MakeExit(const SbfpPath& path, std::size_t nu, bool held) {
  const PathEntry& prev = path.entries[nu - 1];
  const PathEntry& exit = path.entries[nu];
  return ExitRecord{nu, prev.tau, prev.a, exit.tau, exit.a, held};
}

// Shared stepper for the exit-seeking and fixed-length generators. Stops after
// `max_steps` steps or once `stop_on_exit` sees the exit condition.
PathOutcome Run(const ProcessParams& params, const ObservationModel& obs,
                std::uint64_t seed, std::size_t max_steps, std::uint64_t stream,
                bool stop_on_exit) {
  PhiloxStream rng(seed, stream);
  std::normal_distribution<double> gauss(0.0, 1.0);

  PathOutcome out;
  auto& entries = out.path.entries;
  entries.reserve(std::min<std::size_t>(max_steps + 1, 4096));

  const double tau0 = SampleInitialDelay(obs, rng);
  entries.push_back(PathEntry{0, tau0, tau0, params.a0, params.a0, 0.0});

  bool held = true;
  for (std::size_t k = 1; k <= max_steps; ++k) {
    const PathEntry& last = entries.back();
    const double delta = SampleInterarrival(obs, rng);
    const double slope = params.drift.at(k);
    const double noise =
        params.sigma == 0.0 ? 0.0 : params.sigma * std::sqrt(delta) * gauss(rng);
    const double w_inc = slope * delta + noise;
    entries.push_back(PathEntry{k, last.tau + delta, delta, last.a + w_inc, w_inc, slope});

    if (!stop_on_exit) continue;
    switch (Classify(params.shape, params.threshold_mode, entries.back())) {
      case StepVerdict::kMonotone:
        break;
      case StepVerdict::kTie:
        held = false;
        break;
      case StepVerdict::kExit:
        out.exit = MakeExit(out.path, k, held);
        return out;
    }
  }
  out.path.truncated = stop_on_exit;
  return out;
}

Estimate MeanAndError(std::span<const double> xs) {
  Estimate e;
  if (xs.empty()) return e;
  const double n = static_cast<double>(xs.size());
  e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return e;
  double ss = 0.0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  e.se = std::sqrt(ss / (n - 1.0) / n);
  return e;
}

}  // namespace

DriftSchedule::DriftSchedule(std::vector<double> values, DriftExtension extension)
    : values_(std::move(values)), extension_(extension) {
  Require(!values_.empty(), "drift schedule must not be empty");
  for (double w : values_) Require(std::isfinite(w), "drift values must be finite");
}

double DriftSchedule::at(std::size_t k) const {
  Require(k >= 1, "drift schedule is indexed from step 1");
  const std::size_t n = values_.size();
  if (k <= n) return values_[k - 1];
  if (extension_ == DriftExtension::kHoldLast) return values_.back();
  return values_[(k - 1) % n];
}

double DriftSchedule::mean(std::size_t k) const {
  Require(k >= 1, "mean drift needs at least one step");
  double sum = 0.0;
  for (std::size_t j = 1; j <= k; ++j) sum += at(j);
  return sum / static_cast<double>(k);
}

void ProcessParams::Validate() const {
  Require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be finite and >= 0");
  Require(std::isfinite(a0), "a0 must be finite");
}

ObservationModel::ObservationModel(InterarrivalLaw interarrival,
                                   InitialDelayLaw initial_delay)
    : interarrival_(interarrival), initial_delay_(initial_delay) {
  std::visit(Overloaded{
                 [](const Exponential& e) {
                   Require(std::isfinite(e.mean) && e.mean > 0.0,
                           "interarrival mean must be > 0");
                 },
                 [](const Deterministic& d) {
                   Require(std::isfinite(d.step) && d.step > 0.0,
                           "deterministic step must be > 0");
                 }},
             interarrival_);
  std::visit(Overloaded{
                 [](const Exponential& e) {
                   // A zero-mean exponential delay degenerates to ZeroDelay.
                   Require(std::isfinite(e.mean) && e.mean > 0.0,
                           "initial delay mean must be > 0 (use ZeroDelay)");
                 },
                 [](const ZeroDelay&) {}},
             initial_delay_);
}

ObservationModel ObservationModel::Memoryless(double delta_mean, double delta0_mean) {
  if (delta0_mean == 0.0) return {Exponential{delta_mean}, ZeroDelay{}};
  return {Exponential{delta_mean}, Exponential{delta0_mean}};
}

ObservationModel ObservationModel::Regular(double step) {
  return {Deterministic{step}, ZeroDelay{}};
}

double ObservationModel::mean_interarrival() const {
  return std::visit(Overloaded{[](const Exponential& e) { return e.mean; },
                               [](const Deterministic& d) { return d.step; }},
                    interarrival_);
}

double ObservationModel::mean_initial_delay() const {
  return std::visit(Overloaded{[](const Exponential& e) { return e.mean; },
                               [](const ZeroDelay&) { return 0.0; }},
                    initial_delay_);
}

bool ObservationModel::memoryless() const {
  return std::holds_alternative<Exponential>(interarrival_) &&
         std::holds_alternative<Exponential>(initial_delay_);
}

double SampleInterarrival(const ObservationModel& model, PhiloxStream& rng) {
  return std::visit(
      Overloaded{[&](const Exponential& e) { return DrawExponential(e.mean, rng); },
                 [](const Deterministic& d) { return d.step; }},
      model.interarrival());
}

double SampleInitialDelay(const ObservationModel& model, PhiloxStream& rng) {
  return std::visit(
      Overloaded{[&](const Exponential& e) { return DrawExponential(e.mean, rng); },
                 [](const ZeroDelay&) { return 0.0; }},
      model.initial_delay());
}

std::optional<ExitRecord> DetectExit(const SbfpPath& path, Shape shape,
                                     ThresholdMode mode) {
  Require(path.entries.size() >= 2, "exit detection needs a post-tau0 entry");
  bool held = true;
  for (std::size_t k = 1; k < path.entries.size(); ++k) {
    switch (Classify(shape, mode, path.entries[k])) {
      case StepVerdict::kMonotone:
        break;
      case StepVerdict::kTie:
        held = false;
        break;
      case StepVerdict::kExit:
        return MakeExit(path, k, held);
    }
  }
  return std::nullopt;
}

PathOutcome TrySimulatePath(const ProcessParams& params, const ObservationModel& obs,
                            std::uint64_t seed, std::size_t max_steps,
                            std::uint64_t stream) {
  params.Validate();
  Require(max_steps >= 1, "max_steps must be >= 1");
  return Run(params, obs, seed, max_steps, stream, /*stop_on_exit=*/true);
}

PathOutcome SimulatePath(const ProcessParams& params, const ObservationModel& obs,
                         std::uint64_t seed, std::size_t max_steps,
                         std::uint64_t stream) {
  PathOutcome out = TrySimulatePath(params, obs, seed, max_steps, stream);
  if (!out.exit) {
    Fail(ErrorCode::kNoExitWithinCap,
         "no exit within " + std::to_string(max_steps) + " steps");
  }
  return out;
}

SbfpPath GeneratePath(const ProcessParams& params, const ObservationModel& obs,
                      std::uint64_t seed, std::size_t steps, std::uint64_t stream) {
  params.Validate();
  return Run(params, obs, seed, steps, stream, /*stop_on_exit=*/false).path;
}

std::vector<std::optional<ExitRecord>> CollectExits(const ProcessParams& params,
                                                    const ObservationModel& obs,
                                                    const McConfig& cfg) {
  params.Validate();
  Require(cfg.reps >= 1, "reps must be >= 1");
  Require(cfg.max_steps >= 1, "max_steps must be >= 1");

  std::vector<std::optional<ExitRecord>> exits(cfg.reps);
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      exits[i] = Run(params, obs, cfg.seed, cfg.max_steps, i, true).exit;
    }
  };

  unsigned threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::min<std::size_t>(cfg.reps, 256)));
  if (threads == 1) {
    work(0, cfg.reps);
    return exits;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (cfg.reps + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(cfg.reps, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(work, begin, end);
  }
  return exits;
}

McSummary SummarizeExits(std::span<const std::optional<ExitRecord>> exits,
                         const ObservationModel& obs, const TransformArgs& args) {
  McSummary s;
  s.reps = exits.size();
  s.args = args;
  std::vector<double> a_prev, tau_prev, a_exit, tau_exit, nu, functional;
  functional.reserve(exits.size());
  for (const auto& e : exits) {
    if (!e) {
      functional.push_back(0.0);
      continue;
    }
    a_prev.push_back(e->a_prev);
    tau_prev.push_back(e->tau_prev);
    a_exit.push_back(e->a_exit);
    tau_exit.push_back(e->tau_exit);
    nu.push_back(static_cast<double>(e->nu));
    functional.push_back(std::exp(-args.u * e->a_prev - args.v * e->a_exit -
                                  args.vartheta * e->tau_prev -
                                  args.theta * e->tau_exit));
  }
  s.exits = a_prev.size();
  s.truncation_rate =
      s.reps == 0 ? 0.0
                  : static_cast<double>(s.reps - s.exits) / static_cast<double>(s.reps);
  s.a_prev = MeanAndError(a_prev);
  s.tau_prev = MeanAndError(tau_prev);
  s.a_exit = MeanAndError(a_exit);
  s.tau_exit = MeanAndError(tau_exit);
  s.nu = MeanAndError(nu);
  const double step = obs.mean_interarrival();
  s.nu_from_tau = {std::abs(s.tau_exit.mean) / step, s.tau_exit.se / step};
  s.functional = MeanAndError(functional);
  return s;
}

McSummary McEstimate(const ProcessParams& params, const ObservationModel& obs,
                     const TransformArgs& args, const McConfig& cfg) {
  Require(args.u >= 0 && args.v >= 0 && args.vartheta >= 0 && args.theta >= 0,
          "transform variables must be >= 0");
  const auto exits = CollectExits(params, obs, cfg);
  McSummary s = SummarizeExits(exits, obs, args);
  if (s.exits == 0) {
    Fail(ErrorCode::kAllTruncated,
         "all " + std::to_string(s.reps) + " replications hit max_steps");
  }
  return s;
}

}  // namespace sbfp::process
