// Copyright 2026 The logformer-cpp Authors
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

namespace logformer {

/// Base class for every error raised by the library. The CLI maps the
/// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (unknown keys, bad ranges,
/// fingerprint mismatches).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that violates a documented format or contract.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Failures during computation (shape mismatches, non-finite values, I/O).
class RuntimeError : public Error {
 public:
  using Error::Error;
};

enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kData = 3,
  kRuntime = 4,
};

}  // namespace logformer
