// Copyright 2026 The ppbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
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

namespace ppbench {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input value lies outside the domain an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid construction parameters (party counts, moduli, key sizes, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class KeyMismatchError : public Error {
 public:
  using Error::Error;
};

class NotInvertibleError : public Error {
 public:
  using Error::Error;
};

// Prime search exceeded its retry budget.
class RngExhaustedError : public Error {
 public:
  using Error::Error;
};

// Shares or triples that are inconsistent with each other.
class MalformedSharingError : public Error {
 public:
  using Error::Error;
};

// A party did not receive the messages its protocol step needs.
class WiringError : public Error {
 public:
  using Error::Error;
};

class HarnessShutdownError : public Error {
 public:
  using Error::Error;
};

class TimingError : public Error {
 public:
  using Error::Error;
};

class SingularDesignError : public Error {
 public:
  using Error::Error;
};

class CsvError : public Error {
 public:
  enum class Kind { kMissingFile, kMissingColumn, kBadCell, kMalformed };

  CsvError(Kind kind, std::size_t row, const std::string& what)
      : Error(what), kind_(kind), row_(row) {}

  Kind kind() const noexcept { return kind_; }
  // 1-based data row (header excluded); 0 when not tied to a row.
  std::size_t row() const noexcept { return row_; }

 private:
  Kind kind_;
  std::size_t row_;
};

// Wraps the failure of one Monte Carlo iteration.
class IterationError : public Error {
 public:
  IterationError(std::size_t iteration, const std::string& cause)
      : Error("iteration " + std::to_string(iteration) + " failed: " + cause),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace ppbench
