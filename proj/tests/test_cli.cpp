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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sbfp/cli.hpp"
#include "sbfp/pipeline.hpp"

using nlohmann::json;

namespace {

const std::string kSample = std::string(SBFP_SOURCE_DIR) + "/data/sample.csv";

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sbfp");
  std::ostringstream out, err;
  const int code = sbfp::cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path TempFile(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sbfp_cli_" + name);
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("hstar paper mode on the reference problem") {
    const Outcome o =
        Invoke({"hstar", "--delta-mean", "1", "--w-bar", "1", "--w-prev", "1.4", "--mode", "paper"});
    CHECK(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(j.at("paper").at("h_star").get<double>() == doctest::Approx(1.444).epsilon(1e-3));
    CHECK(j.at("paper").at("residual").get<double>() < 1e-9);
  }

  TEST_CASE("hstar without a root exits 1 with a diagnostic") {
    const Outcome o =
        Invoke({"hstar", "--delta-mean", "1", "--w-bar", "1", "--w-prev", "2", "--mode", "paper"});
    CHECK(o.code == 1);
    const json j = json::parse(o.out);
    CHECK(j.at("paper").at("solver_status") == "no_root_in_bracket");
    CHECK(j.at("paper").contains("diagnostics"));
  }

  TEST_CASE("hstar degenerate drift is a domain error") {
    const Outcome o = Invoke({"hstar", "--delta-mean", "1", "--w-bar", "1", "--w-prev", "1"});
    CHECK(o.code == 1);
    const json j = json::parse(o.out);
    CHECK(j.at("paper").at("status") == "failed");
    CHECK(j.at("paper").at("reason").get<std::string>().find("DegenerateDrift") !=
          std::string::npos);
  }

  TEST_CASE("hstar plot data") {
    const auto path = TempFile("plot.csv");
    const Outcome o = Invoke({"hstar", "--delta-mean", "1", "--w-bar", "1", "--w-prev", "1.4",
                              "--mode", "both", "--plot-data", path.string()});
    CHECK(o.code == 0);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "h,m_h,g_h");
    int rows = 0;
    while (std::getline(in, line)) {
      CHECK(std::count(line.begin(), line.end(), ',') == 2);
      ++rows;
    }
    CHECK(rows == 1000);
    std::filesystem::remove(path);
  }

  TEST_CASE("game from a payoff file") {
    const auto path = TempFile("mp.json");
    {
      std::ofstream f(path);
      f << R"({"payoff1": [[1, -1], [-1, 1]], "payoff2": [[-1, 1], [1, -1]]})";
    }
    const Outcome o = Invoke({"game", "--payoff", path.string()});
    CHECK(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(j.at("equilibrium").at("p") == 0.5);
    CHECK(j.at("equilibrium").at("q") == 0.5);
    std::filesystem::remove(path);
  }

  TEST_CASE("game from builder flags") {
    const Outcome o = Invoke({"game", "--a-prev", "2", "--a-exit", "1", "--mean-step", "1",
                              "--cost", "0.1", "--brute-force", "101"});
    CHECK(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(j.at("game").at("payoff1")[0][0] == 3.0);
    CHECK(j.contains("brute_force"));
  }

  TEST_CASE("usage errors exit 2 and name the flag") {
    const Outcome o = Invoke({"hstar", "--delta-mean", "1", "--w-bar", "1", "--w-prev", "1.4",
                              "--bogus"});
    CHECK(o.code == 2);
    CHECK(o.err.find("--bogus") != std::string::npos);
    CHECK(Invoke({}).code == 2);
    CHECK(Invoke({"hstar", "--w-bar", "1", "--w-prev", "1.4"}).code == 2);
    CHECK(Invoke({"hstar", "--delta-mean", "x", "--w-bar", "1", "--w-prev", "1.4"}).code == 2);
  }

  TEST_CASE("I/O errors exit 2") {
    CHECK(Invoke({"fit", "--csv", "/nonexistent/series.csv"}).code == 2);
    CHECK(Invoke({"game", "--payoff", "/nonexistent/game.json"}).code == 2);
  }

  TEST_CASE("malformed CSV exits 2 with the line number") {
    const auto path = TempFile("bad.csv");
    {
      std::ofstream f(path);
      f << "timestamp,value\n1,1\n2,2\n3,3\n4,abc\n";
    }
    const Outcome o = Invoke({"fit", "--csv", path.string()});
    CHECK(o.code == 2);
    CHECK(o.err.find("line 5") != std::string::npos);
    std::filesystem::remove(path);
  }

  TEST_CASE("fit") {
    const Outcome o = Invoke({"fit", "--csv", kSample, "--window", "5"});
    CHECK(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(j.at("sigma_hat").get<double>() >= 0.0);
    CHECK(j.at("delta_hat").get<double>() > 0.0);
  }

  TEST_CASE("predict writes a byte-identical report at any thread count") {
    const auto a = TempFile("report_a.json");
    const auto b = TempFile("report_b.json");
    const Outcome oa = Invoke({"predict", "--csv", kSample, "--seed", "7", "--mc-reps", "3000",
                               "--threads", "1", "--out", a.string()});
    const Outcome ob = Invoke({"predict", "--csv", kSample, "--seed", "7", "--mc-reps", "3000",
                               "--threads", "6", "--out", b.string()});
    CHECK(oa.code == 0);
    CHECK(ob.code == 0);
    const std::string ra = Slurp(a);
    CHECK_FALSE(ra.empty());
    CHECK(ra == Slurp(b));
    const json j = json::parse(ra);
    CHECK(j.at("version") == std::string(sbfp::pipeline::kToolVersion));
    CHECK(j.at("seed") == 7);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
  }

  TEST_CASE("predict h* equals standalone hstar on the fitted parameters") {
    const json report = json::parse(Invoke({"predict", "--csv", kSample}).out);
    const json fit = report.at("fit");
    const auto num = [](double v) {
      std::ostringstream s;
      s.precision(17);
      s << v;
      return s.str();
    };
    const Outcome o = Invoke({"hstar", "--delta-mean", num(fit.at("delta_hat")), "--w-bar",
                              num(fit.at("w_bar_hat")), "--w-prev", num(fit.at("w_prev_hat")),
                              "--mode", "paper"});
    const json standalone = json::parse(o.out);
    CHECK(report.at("hstar_paper").at("h_star") == standalone.at("paper").at("h_star"));
    CHECK(report.at("diagnostics").at("h_star") == standalone.at("paper").at("h_star"));
  }

  TEST_CASE("simulate is deterministic across thread counts") {
    const std::vector<std::string> base{"simulate", "--sigma", "1", "--drift", "0.2,0.5",
                                        "--reps", "2000", "--seed", "3"};
    auto one = base, many = base;
    one.insert(one.end(), {"--threads", "1"});
    many.insert(many.end(), {"--threads", "5"});
    const Outcome a = Invoke(one);
    const Outcome b = Invoke(many);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }

  TEST_CASE("reconcile small grid") {
    const Outcome o = Invoke({"reconcile", "--drift", "1,1.4", "--u-grid", "0,1", "--h-grid",
                              "1,2", "--reps", "2000"});
    CHECK(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(j.at("rows").size() == 4);
  }
}
