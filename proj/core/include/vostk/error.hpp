// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vostk {

// Base of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two inputs that must share a shape do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value outside the documented domain (non-binary target, even window...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed file or corpus on disk.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A scene or training configuration that cannot be realised.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vostk
