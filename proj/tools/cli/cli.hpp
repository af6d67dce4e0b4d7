/* Copyright 2026 The qmetro Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef QMETRO_TOOLS_CLI_HPP_
#define QMETRO_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qmetro/qubit.hpp"

namespace qmetro::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitInvariant = 3;

/// Runs the command line `args` (without the program name). Data goes to
/// `out` unless redirected by --out; diagnostics go to `err` as one JSON
/// object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// "start:stop:step", inclusive of stop within rounding.
std::vector<double> parse_grid(std::string_view text);

/// "a,b,c".
Vector3 parse_vector3(std::string_view text);

}  // namespace qmetro::cli

#endif  // QMETRO_TOOLS_CLI_HPP_
