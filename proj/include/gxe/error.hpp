// Copyright 2026 The gxe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace gxe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (bad header, unknown symbol, non-numeric field).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a table invariant (ragged lengths,
/// missing periods, empty joins).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Factorization or evaluation failure inside a numerical routine.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Unresolvable user request (unknown preset, invalid flag combination).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace gxe
