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

#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "sbfp/error.hpp"
#include "sbfp/process.hpp"
#include "sbfp/series.hpp"

using namespace sbfp;
using namespace sbfp::pipeline;

namespace {

SeriesData Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseCsv(in, "inline");
}

// Line and column of the ParseError raised by text; (0, 0) when none.
std::pair<std::size_t, std::size_t> ErrorAt(const std::string& text, std::string* what = nullptr) {
  try {
    Parse(text);
  } catch (const ParseError& e) {
    if (what) *what = e.what();
    return {e.line(), e.column()};
  }
  return {0, 0};
}

SeriesData Synthetic(double sigma, double w, std::uint64_t seed, std::size_t n) {
  process::ProcessParams params;
  params.sigma = sigma;
  params.a0 = 10.0;
  params.drift = process::DriftSchedule({w});
  const auto obs = process::ObservationModel::Regular(1.0);
  const process::SbfpPath path = process::GeneratePath(params, obs, seed, n - 1);
  SeriesData s;
  for (const auto& e : path.entries) s.points.push_back({1.7e9 + e.tau, e.a});
  return s;
}

}  // namespace

TEST_SUITE("csv") {
  TEST_CASE("well-formed file") {
    const SeriesData s = Parse("timestamp,value\n100,1.5\n200,2\n300,-0.25\n");
    REQUIRE(s.points.size() == 3);
    CHECK(s.points[0].timestamp == 100.0);
    CHECK(s.points[2].value == -0.25);
    CHECK(s.source == "inline");
  }

  TEST_CASE("iso timestamps") {
    double t = 0.0;
    REQUIRE(ParseTimestamp("2026-01-01", t));
    CHECK(t == 1767225600.0);
    REQUIRE(ParseTimestamp("2026-01-01T00:00:01Z", t));
    CHECK(t == 1767225601.0);
    REQUIRE(ParseTimestamp("2026-01-01 01:30:00+01:30", t));
    CHECK(t == 1767225600.0);
    REQUIRE(ParseTimestamp("1970-01-01T00:00:00.5-00:00", t));
    CHECK(t == 0.5);
    REQUIRE(ParseTimestamp("1767225600", t));
    CHECK(t == 1767225600.0);
    CHECK_FALSE(ParseTimestamp("2026-02-30", t));
    CHECK_FALSE(ParseTimestamp("2026-01-01T25", t));
    CHECK_FALSE(ParseTimestamp("yesterday", t));
    CHECK_FALSE(ParseTimestamp("", t));
  }

  TEST_CASE("bad value on line 5") {
    const std::string text = "timestamp,value\n1,1\n2,2\n3,3\n4,abc\n5,5\n";
    const auto at = ErrorAt(text);
    CHECK(at.first == 5);
    CHECK(at.second == 2);
  }

  TEST_CASE("duplicate timestamp on line 7") {
    const std::string text = "timestamp,value\n1,1\n2,2\n3,3\n4,4\n5,5\n5,6\n";
    std::string what;
    const auto at = ErrorAt(text, &what);
    CHECK(at.first == 7);
    CHECK(what.find("non-increasing timestamp") != std::string::npos);
  }

  TEST_CASE("malformed fixtures report their line") {
    struct Fixture {
      std::string text;
      std::size_t line;
      std::size_t column;
    };
    const Fixture fixtures[] = {
        {"time,value\n1,1\n", 1, 1},
        {"timestamp,value\n1,1\n2\n", 3, 2},
        {"timestamp,value\n1,1\n2,2,2\n", 3, 3},
        {"timestamp,value\n1,1\nnope,2\n", 3, 1},
        {"timestamp,value\n1,1\n2,nan\n", 3, 2},
        {"timestamp,value\n1,1\n2,inf\n", 3, 2},
        {"timestamp,value\n1,1\n2,2\n\n1,3\n", 5, 1},
        {"timestamp,value\n1,1\n2,\n", 3, 2},
    };
    for (const Fixture& f : fixtures) {
      CAPTURE(f.text);
      const auto at = ErrorAt(f.text);
      CHECK(at.first == f.line);
      CHECK(at.second == f.column);
    }
  }

  TEST_CASE("blank lines, CRLF and byte-order mark are tolerated") {
    const SeriesData s = Parse("\xEF\xBB\xBFtimestamp,value\r\n1,1\r\n\r\n2,2\r\n");
    CHECK(s.points.size() == 2);
  }

  TEST_CASE("header only is an empty series") {
    try {
      Parse("timestamp,value\n");
      FAIL("expected EmptySeries");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kEmptySeries);
    }
  }

  TEST_CASE("write and re-read are lossless") {
    const SeriesData s = Synthetic(0.3, 0.7, 4, 50);
    std::ostringstream out;
    WriteCsv(out, s);
    const SeriesData back = Parse(out.str());
    REQUIRE(back.points.size() == s.points.size());
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      CHECK(back.points[i].timestamp == s.points[i].timestamp);
      CHECK(back.points[i].value == s.points[i].value);
    }
  }

  TEST_CASE("missing file") {
    try {
      LoadCsv("/nonexistent/sbfp.csv");
      FAIL("expected an I/O error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kIo);
    }
  }
}

TEST_SUITE("fit") {
  TEST_CASE("recovers a simulated series") {
    const SeriesData s = Synthetic(0.5, 1.0, 99, 1000);
    const FitResult f = FitParams(s);
    CHECK(f.sigma_hat >= 0.45);
    CHECK(f.sigma_hat <= 0.55);
    CHECK(std::abs(f.w_bar_hat - 1.0) <= 3.0 * f.w_bar_se);
    CHECK(f.delta_hat == doctest::Approx(1.0));
    CHECK(f.points == 1000);
    CHECK(f.a0 == s.points.back().value);
  }

  TEST_CASE("generate and recover over 20 seeded series") {
    int recovered = 0;
    std::uint64_t seed = 1000;
    for (double sigma : {0.1, 0.5}) {
      for (double w : {0.5, 1.0}) {
        for (int r = 0; r < 5; ++r) {
          const FitResult f = FitParams(Synthetic(sigma, w, seed++, 1000));
          const bool ok = std::abs(f.sigma_hat - sigma) <= 0.15 * sigma &&
                          std::abs(f.w_bar_hat - w) <= 3.0 * f.w_bar_se;
          if (ok) ++recovered;
        }
      }
    }
    MESSAGE("recovered " << recovered << " of 20");
    CHECK(recovered >= 18);
  }

  TEST_CASE("w_bar is the mean of the window drifts") {
    const FitResult f = FitParams(Synthetic(0.2, 0.3, 8, 103), 7);
    REQUIRE(f.drift_windows.size() == 102 / 7);
    double sum = 0.0;
    for (const DriftWindow& w : f.drift_windows) sum += w.drift;
    CHECK(f.w_bar_hat == doctest::Approx(sum / f.drift_windows.size()).epsilon(1e-15));
    CHECK(f.w_prev_hat == f.drift_windows.back().drift);
  }

  TEST_CASE("constant series") {
    SeriesData s;
    for (int i = 0; i < 20; ++i) s.points.push_back({60.0 * i, 3.0});
    const FitResult f = FitParams(s);
    CHECK(f.sigma_hat == 0.0);
    for (const DriftWindow& w : f.drift_windows) CHECK(w.drift == 0.0);
    CHECK(f.delta_hat == doctest::Approx(1.0));
  }

  TEST_CASE("time units") {
    SeriesData s;
    for (int i = 0; i < 20; ++i) s.points.push_back({43200.0 * i, 0.5 * i});
    CHECK(FitParams(s, 5, TimeUnit::kDay).delta_hat == doctest::Approx(0.5));
    CHECK(FitParams(s, 5, TimeUnit::kDay).w_bar_hat == doctest::Approx(1.0));
    CHECK(FitParams(s, 5, TimeUnit::kSecond).delta_hat == doctest::Approx(43200.0));
    CHECK(FitParams(s, 5, TimeUnit::kObservation).w_bar_hat == doctest::Approx(0.5));
    CHECK(ParseTimeUnit("day") == TimeUnit::kDay);
    CHECK(TimeUnitName(TimeUnit::kSecond) == "sec");
    CHECK_THROWS_AS(ParseTimeUnit("week"), Error);
  }

  TEST_CASE("window larger than half the series") {
    const SeriesData s = Synthetic(0.2, 0.3, 8, 9);
    try {
      FitParams(s, 5);
      FAIL("expected TooShort");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kTooShort);
    }
    CHECK_THROWS_AS(FitParams(s, 1), Error);
  }
}
