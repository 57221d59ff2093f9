// Copyright 2026 The nmrswitch Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nmrswitch {

// Operands of incompatible dimension (state vs operator, operator vs
// operator).
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A text input (sequence, circuit, permutation, frame) failed to parse.
// `line()` is 1-based; 0 when the input is a single token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " +
                                           what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A two-spin gate was requested between spins that have no J coupling.
class CouplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Q/C readout of a state with no dominant basis amplitude.
class SuperposedState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nmrswitch
