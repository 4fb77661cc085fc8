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

// Command-line front end. Subcommands: simulate, hstar, game, fit, predict,
// reconcile. Exit codes: 0 success, 1 domain error (report still written),
// 2 usage or I/O error.

#ifndef SBFP_CLI_HPP_
#define SBFP_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace sbfp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// args[0] is the program name.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbfp::cli

#endif  // SBFP_CLI_HPP_
