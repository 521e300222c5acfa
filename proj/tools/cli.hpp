// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace spatialift::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kIoError = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kSchemaError = 3;
inline constexpr int kAlignmentError = 4;

// Runs one command line (args exclude the program name). Output goes to
// stdout/stderr.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace spatialift::cli
