/* Copyright 2026 The qmetro Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef QMETRO_ERRORS_HPP_
#define QMETRO_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmetro {

enum class ErrorKind {
  NonHermitianInput,
  DomainError,
  SingularJacobian,
  IndexOutOfRange,
  SingularQfim,
  DivergentTime,
  DegenerateSpectrum,
  DegenerateInput,
  BracketFailure,
  NoContraction,
  MleNonconvergence,
  InvariantViolation,
};

/// Stable identifier used in CLI diagnostics, e.g. "SingularQfim".
std::string_view error_kind_name(ErrorKind kind) noexcept;

/// All library failures are reported through this exception; `kind()`
/// identifies the failure class independently of the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace qmetro

#endif  // QMETRO_ERRORS_HPP_
