// Copyright 2026 The qelm-scrambling Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qelm {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shape mismatch, index out of range, or a dimension above the configured cap.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A value handed to a strong type does not satisfy that type's invariant.
class InvariantError : public Error {
  public:
    using Error::Error;
};

/// Eigensolver/SVD failure or numerically corrupted intermediate data.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Invalid or out-of-range configuration. `field()` names the offending key.
class ConfigError : public Error {
  public:
    ConfigError(std::string field, const std::string &what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {
    }
    const std::string &field() const noexcept {
        return field_;
    }

  private:
    std::string field_;
};

}  // namespace qelm
