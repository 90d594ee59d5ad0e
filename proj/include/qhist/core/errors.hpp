// Copyright 2026 The qhist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qhist {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An object violates the invariants of its type: unknown label, dimension
/// cap exceeded, non-unitary gate, incomplete projector family, non-PSD
/// density matrix, malformed shape.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A well-formed object was passed to an operation whose preconditions it
/// does not meet (zero-probability history, mixed state where a pure one is
/// required, evaluation time before the last event, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A numerical self-check exceeded its tolerance.
class ToleranceBreach : public Error {
 public:
  using Error::Error;
};

}  // namespace qhist
