// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace spatialift {

// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad box, empty descriptor, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Text could not be parsed. `token()` holds the offending fragment.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string token)
      : Error(what + " (at '" + token + "')"), token_(std::move(token)) {}
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

// Decoded box has x1 > x2 or y1 > y2, or lies outside the image.
class DegenerateDecode : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (overlapping vocabularies, bad mix, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An input record does not follow its schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spatialift
