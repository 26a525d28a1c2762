// Copyright 2026 The dsmc Authors
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

namespace dsmc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input: bad syntax, broken invariants, bad flags.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Sets or mass functions built over different frames were mixed.
class FrameMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A caller broke an operation's precondition (e.g. a non-simple-support
/// source handed to the simple-support kernel).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Dempster's rule is undefined: every combination of outcomes is empty.
class TotalConflict : public Error {
 public:
  using Error::Error;
};

/// A Monte-Carlo trial hit its restart cap. Carries the conflict estimate
/// observed up to the failure.
class ExcessiveConflict : public Error {
 public:
  ExcessiveConflict(const std::string& what, double kappa_hat)
      : Error(what), kappa_hat_(kappa_hat) {}

  double kappa_hat() const noexcept { return kappa_hat_; }

 private:
  double kappa_hat_;
};

/// A configured size or time cap was exceeded.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace dsmc
