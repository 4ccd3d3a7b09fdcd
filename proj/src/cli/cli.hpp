// Copyright 2026 The VCProg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vcprog::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point of the `vcprog` tool. `args` excludes the program name.
/// Subcommands: run, generate, bench-ipc.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Guest command used when --guest-cmd is absent: the native guest runner
/// installed next to the running executable.
std::string default_guest_command();

}  // namespace vcprog::cli
