// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace spatialift {

// Porter (1980) suffix-stripping stemmer, original rule set. Input is
// expected to be a lowercase ASCII word.
std::string porter_stem(std::string_view word);

}  // namespace spatialift
