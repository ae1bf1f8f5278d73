// Copyright 2026 The TSHK Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Exception hierarchy shared by all modules.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace tshk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad sizes, out-of-range settings).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// A call violated an operation's preconditions.
class UsageError : public Error {
  public:
    using Error::Error;
};

/// Training cannot proceed (e.g. a batch without both classes).
class TrainingError : public Error {
  public:
    using Error::Error;
};

/// Malformed dataset input. The message carries the offending line.
class IngestionError : public Error {
  public:
    using Error::Error;
};

/// No feasible circuit placement on the device.
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// A quantity is mathematically undefined for the given input
/// (zero-denominator kernel weights, single-class AUC, uniform ideal
/// distribution in result fidelity).
class DegenerateError : public Error {
  public:
    using Error::Error;
};

} // namespace tshk
