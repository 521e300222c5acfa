// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

int main(int argc, char** argv) { return spatialift::cli::run(argc, argv); }
