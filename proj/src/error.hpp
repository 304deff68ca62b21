// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MRCAP_ERROR_HPP
#define MRCAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mrcap {

enum class ErrorKind {
  Config,      // invalid configuration values
  Usage,       // bad call arguments (rank out of range, etc.)
  Capability,  // backend not available (missing/unwritable sysfs)
  Io,          // file read/write failure
  Internal,    // broken invariant, always a bug
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace mrcap

#endif
