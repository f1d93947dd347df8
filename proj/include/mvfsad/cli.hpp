// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvfsad {

/// Exit codes of run_command.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Runs one CLI invocation. `args` excludes the program name.
/// Subcommands: synth, render, train, eval, infer, gradcheck, metrics, toy.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(const std::vector<std::string>& args);

}  // namespace mvfsad
