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

#include "sbfp/series.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "sbfp/error.hpp"

namespace sbfp::pipeline {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool ParseDouble(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool ParseFixedInt(std::string_view s, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  const char* begin = s.data() + pos;
  const auto [ptr, ec] = std::from_chars(begin, begin + width, out);
  return ec == std::errc() && ptr == begin + width;
}

bool ParseIso(std::string_view s, double& seconds) {
  int y = 0, mo = 0, d = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return false;
  if (!ParseFixedInt(s, 0, 4, y) || !ParseFixedInt(s, 5, 2, mo) || !ParseFixedInt(s, 8, 2, d)) {
    return false;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  double total = static_cast<double>(std::chrono::sys_days{ymd}.time_since_epoch().count()) * 86400.0;

  std::size_t pos = 10;
  if (pos == s.size()) {
    seconds = total;
    return true;
  }
  if (s[pos] != 'T' && s[pos] != ' ') return false;
  ++pos;
  int hh = 0, mm = 0;
  if (!ParseFixedInt(s, pos, 2, hh) || pos + 2 >= s.size() || s[pos + 2] != ':' ||
      !ParseFixedInt(s, pos + 3, 2, mm)) {
    return false;
  }
  pos += 5;
  double ss = 0.0;
  if (pos < s.size() && s[pos] == ':') {
    std::size_t end = pos + 1;
    while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.')) {
      ++end;
    }
    if (!ParseDouble(s.substr(pos + 1, end - pos - 1), ss)) return false;
    pos = end;
  }
  if (hh > 23 || mm > 59 || ss < 0.0 || ss >= 61.0) return false;
  total += hh * 3600.0 + mm * 60.0 + ss;

  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      pos = s.size();
    } else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
      int oh = 0, om = 0;
      if (!ParseFixedInt(s, pos + 1, 2, oh) || !ParseFixedInt(s, pos + 4, 2, om)) return false;
      const double offset = oh * 3600.0 + om * 60.0;
      total += s[pos] == '+' ? -offset : offset;
      pos = s.size();
    } else {
      return false;
    }
  }
  seconds = total;
  return true;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double UnitScale(TimeUnit unit, double mean_spacing_seconds) {
  switch (unit) {
    case TimeUnit::kObservation:
      return mean_spacing_seconds;
    case TimeUnit::kSecond:
      return 1.0;
    case TimeUnit::kDay:
      return 86400.0;
  }
  return 1.0;
}

}  // namespace

bool ParseTimestamp(std::string_view text, double& seconds) {
  text = Trim(text);
  if (text.size() >= 10 && text[4] == '-') return ParseIso(text, seconds);
  double v = 0.0;
  if (!ParseDouble(text, v) || !std::isfinite(v)) return false;
  seconds = v;
  return true;
}

SeriesData ParseCsv(std::istream& in, std::string source) {
  SeriesData series;
  series.source = std::move(source);
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) continue;

    const std::vector<std::string_view> fields = SplitFields(line);
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != "timestamp" || fields[1] != "value") {
        throw ParseError(line_no, 1, "expected header \"timestamp,value\"");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 2) {
      throw ParseError(line_no, std::min<std::size_t>(fields.size() + 1, 3),
                       "expected 2 fields, found " + std::to_string(fields.size()));
    }
    SeriesPoint point;
    if (!ParseTimestamp(fields[0], point.timestamp)) {
      throw ParseError(line_no, 1, "invalid timestamp \"" + std::string(fields[0]) + "\"");
    }
    if (!ParseDouble(fields[1], point.value)) {
      throw ParseError(line_no, 2, "invalid number \"" + std::string(fields[1]) + "\"");
    }
    if (!std::isfinite(point.value)) throw ParseError(line_no, 2, "non-finite value");
    if (!series.points.empty() && point.timestamp <= series.points.back().timestamp) {
      throw ParseError(line_no, 1, "non-increasing timestamp");
    }
    series.points.push_back(point);
  }
  if (!header_seen) throw ParseError(std::max<std::size_t>(line_no, 1), 1, "missing header");
  if (series.points.empty()) Fail(ErrorCode::kEmptySeries, "no data rows in " + series.source);
  return series;
}

SeriesData LoadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  return ParseCsv(in, path);
}

void WriteCsv(std::ostream& out, const SeriesData& series) {
  out << "timestamp,value\n";
  char buf[64];
  for (const SeriesPoint& p : series.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.timestamp, p.value);
    out << buf;
  }
}

std::string_view TimeUnitName(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::kObservation:
      return "obs";
    case TimeUnit::kSecond:
      return "sec";
    case TimeUnit::kDay:
      return "day";
  }
  return "unknown";
}

TimeUnit ParseTimeUnit(std::string_view name) {
  if (name == "obs") return TimeUnit::kObservation;
  if (name == "sec") return TimeUnit::kSecond;
  if (name == "day") return TimeUnit::kDay;
  Fail(ErrorCode::kInvalidArgument, "unknown time unit \"" + std::string(name) + "\"");
}

FitResult FitParams(const SeriesData& series, std::size_t window, TimeUnit unit) {
  Require(window >= 2, "window must be >= 2");
  const std::vector<SeriesPoint>& pts = series.points;
  if (pts.size() < 3 || pts.size() < 2 * window) {
    Fail(ErrorCode::kTooShort, "series has " + std::to_string(pts.size()) +
                                   " points; need at least max(3, 2*window)");
  }
  const std::size_t increments = pts.size() - 1;
  const double span_seconds = pts.back().timestamp - pts.front().timestamp;
  if (!(span_seconds > 0.0)) Fail(ErrorCode::kZeroSpan, "series spans zero time");
  const double scale = UnitScale(unit, span_seconds / static_cast<double>(increments));
  const auto time = [&](std::size_t i) { return (pts[i].timestamp - pts.front().timestamp) / scale; };

  FitResult fit;
  fit.window = window;
  fit.points = pts.size();
  fit.time_unit = unit;
  fit.a0 = pts.back().value;
  fit.delta_hat = time(pts.size() - 1) / static_cast<double>(increments);

  const std::size_t windows = increments / window;
  double residual_sum = 0.0;
  double inverse_span_sum = 0.0;
  for (std::size_t k = 0; k < windows; ++k) {
    const std::size_t first = k * window;
    const std::size_t last = first + window;
    const double t0 = time(first);
    const double t1 = time(last);
    if (!(t1 > t0)) Fail(ErrorCode::kZeroSpan, "window " + std::to_string(k) + " spans zero time");
    const double drift = (pts[last].value - pts[first].value) / (t1 - t0);
    fit.drift_windows.push_back({t0, t1, drift});
    inverse_span_sum += 1.0 / (t1 - t0);
    for (std::size_t i = first; i < last; ++i) {
      const double dt = time(i + 1) - time(i);
      const double r = (pts[i + 1].value - pts[i].value) - drift * dt;
      residual_sum += r * r / dt;
    }
  }
  const double dof = static_cast<double>(windows * window - windows);
  fit.sigma_hat = std::sqrt(residual_sum / dof);
  double sum = 0.0;
  for (const DriftWindow& w : fit.drift_windows) sum += w.drift;
  const double k = static_cast<double>(windows);
  fit.w_bar_hat = sum / k;
  fit.w_prev_hat = fit.drift_windows.back().drift;
  fit.w_bar_se = fit.sigma_hat * std::sqrt(inverse_span_sum) / k;
  return fit;
}

}  // namespace sbfp::pipeline
