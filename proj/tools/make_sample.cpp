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

// Writes the bundled synthetic series: exponential observation spacing with a
// mean of one day, a unit drift that steepens for the final window.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sbfp/process.hpp"
#include "sbfp/series.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic sample series generator", "sbfp_make_sample"};
  std::uint64_t seed = 20261016;
  std::size_t points = 200;
  double sigma = 0.1;
  double base_drift = 1.0;
  double final_drift = 1.6;
  std::size_t final_steps = 9;
  double start_epoch = 1767225600.0;  // 2026-01-01T00:00:00Z
  std::string out_path;
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--points", points)->capture_default_str();
  app.add_option("--sigma", sigma)->capture_default_str();
  app.add_option("--base-drift", base_drift)->capture_default_str();
  app.add_option("--final-drift", final_drift)->capture_default_str();
  app.add_option("--final-steps", final_steps)->capture_default_str();
  app.add_option("--out", out_path, "output CSV (stdout when omitted)");
  CLI11_PARSE(app, argc, argv);

  if (points < 2 || final_steps >= points) {
    std::cerr << "error: need points >= 2 and final-steps < points\n";
    return 2;
  }
  std::vector<double> drift(points - 1, base_drift);
  for (std::size_t k = points - 1 - final_steps; k < points - 1; ++k) drift[k] = final_drift;

  sbfp::process::ProcessParams params;
  params.sigma = sigma;
  params.a0 = 100.0;
  params.drift = sbfp::process::DriftSchedule(drift);
  const auto obs = sbfp::process::ObservationModel::Memoryless(1.0, 0.0);
  const auto path = sbfp::process::GeneratePath(params, obs, seed, points - 1);

  sbfp::pipeline::SeriesData series;
  for (const auto& e : path.entries) {
    series.points.push_back({start_epoch + std::round(e.tau * 86400.0), e.a});
  }
  if (out_path.empty()) {
    sbfp::pipeline::WriteCsv(std::cout, series);
    return 0;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return 2;
  }
  sbfp::pipeline::WriteCsv(file, series);
  return 0;
}
