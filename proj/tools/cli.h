// Copyright 2026 The egress-warden Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WARDEN_TOOLS_CLI_H_
#define WARDEN_TOOLS_CLI_H_

#include <iosfwd>

namespace warden::cli {

enum class ExitCode : int {
  kOk = 0,       // success, all checks passed, or an allowed flow
  kFailure = 1,  // violations, failed tests, breaches, oracle disagreement
  kUsage = 2,    // bad flags, unreadable or unparseable input
  kDeny = 3,     // explain: the flow is denied
};

// Entry point for the `warden` tool. Reports go to `out`, diagnostics to
// `err`.
ExitCode Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace warden::cli

#endif  // WARDEN_TOOLS_CLI_H_
