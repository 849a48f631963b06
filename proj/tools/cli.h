// Copyright 2026 The Earsim Authors. All Rights Reserved.
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

#ifndef EARSIM_TOOLS_CLI_H_
#define EARSIM_TOOLS_CLI_H_

#include <iosfwd>

namespace earsim {

// Entry point of the `earsim` tool. Returns the process exit status: 0 on
// success, the ErrorCode value of the first failure otherwise.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace earsim

#endif  // EARSIM_TOOLS_CLI_H_
