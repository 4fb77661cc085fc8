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

// Observed level series and the windowed parameter estimator.

#ifndef SBFP_SERIES_HPP_
#define SBFP_SERIES_HPP_

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sbfp::pipeline {

struct SeriesPoint {
  double timestamp = 0.0;  // seconds since the Unix epoch
  double value = 0.0;
};

struct SeriesData {
  std::vector<SeriesPoint> points;
  std::string source;
};

// Timestamp field: integer or decimal epoch seconds, or ISO-8601
// (YYYY-MM-DD, optionally followed by 'T' or ' ' and hh:mm[:ss[.fff]] and a
// 'Z' or +hh:mm / -hh:mm offset). Returns false on malformed input.
bool ParseTimestamp(std::string_view text, double& seconds);

// Expects the header "timestamp,value". Throws ParseError (1-based line and
// column) on malformed rows, non-finite values or non-increasing timestamps,
// and kEmptySeries when there are no data rows.
SeriesData ParseCsv(std::istream& in, std::string source);
SeriesData LoadCsv(const std::string& path);

// Writes epoch timestamps with 17 significant digits.
void WriteCsv(std::ostream& out, const SeriesData& series);

enum class TimeUnit { kObservation, kSecond, kDay };
std::string_view TimeUnitName(TimeUnit unit);
TimeUnit ParseTimeUnit(std::string_view name);

struct DriftWindow {
  double start = 0.0;  // in the configured time unit
  double end = 0.0;
  double drift = 0.0;
};

struct FitResult {
  double sigma_hat = 0.0;
  std::vector<DriftWindow> drift_windows;
  double w_bar_hat = 0.0;
  double w_bar_se = 0.0;  // sigma_hat * sqrt(sum 1/span_k) / K
  double w_prev_hat = 0.0;
  double delta_hat = 0.0;
  double a0 = 0.0;
  std::size_t window = 0;
  std::size_t points = 0;
  TimeUnit time_unit = TimeUnit::kObservation;
};

inline constexpr std::size_t kDefaultWindow = 5;

// Splits the increments into complete windows of `window` observations. Each
// window's drift is its level change over its time span; sigma_hat^2 pools
// the squared standardized residuals with one degree of freedom removed per
// window.
FitResult FitParams(const SeriesData& series, std::size_t window = kDefaultWindow,
                    TimeUnit unit = TimeUnit::kObservation);

}  // namespace sbfp::pipeline

#endif  // SBFP_SERIES_HPP_
