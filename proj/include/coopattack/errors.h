// Copyright 2026 The coopattack Authors
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

#ifndef COOPATTACK_ERRORS_H_
#define COOPATTACK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace coopattack {

// Shape or range violation on an argument (wrong vector length, bad config).
class RejectedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Illegal game transition: wrong phase or out-of-range action.
class RejectedMove : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Bayes update whose observation has zero probability under the prior.
class ZeroProbabilityEvent : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-finite value produced where the contract forbids it.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Induced payoffs break the role-swap symmetry a matrix-game dilemma needs.
class AsymmetricGame : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coopattack

#endif  // COOPATTACK_ERRORS_H_
