// Copyright 2026 The rwre Authors
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

namespace rwre {

// Base of every error the library throws. The CLI maps the subclasses onto
// exit codes (usage 2, precondition 3, resource cap 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (e.g. rho(0)).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A modelling precondition does not hold (no kappa, window too small, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// No kappa exists because rho <= 1 almost surely.
class NoRootError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// The moment map diverges before it recrosses 1.
class NotBracketableError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Numerical integration failed to reach its tolerance. Distinct from a
// divergent integral, which is reported as +infinity.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

// A step or iteration cap was exceeded.
class ResourceCapError : public Error {
 public:
  using Error::Error;
};

}  // namespace rwre
