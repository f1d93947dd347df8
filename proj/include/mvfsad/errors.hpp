// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mvfsad {

/// Precondition on an argument was violated (shape, range, count).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation hit a degenerate numeric case (zero-norm vector, non-finite loss).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Metric is undefined for the given labels (e.g. a single class).
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace mvfsad
