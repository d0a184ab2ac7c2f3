// Copyright 2026 The sigrank authors
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

#ifndef SIGRANK_ERRORS_HPP
#define SIGRANK_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sigrank {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimMismatchError : public Error {
 public:
  using Error::Error;
};

// Cholesky / repair failure; remembers which pivot went non-positive.
class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(const std::string& msg, std::size_t pivot)
      : Error(msg), pivot_(pivot) {}
  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_ = 0;
};

// Iterative eigensolver ran out of iterations; carries the residual it got stuck at.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& msg, double residual)
      : Error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

class InvalidComponentCountError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class InvalidShrinkageError : public Error {
 public:
  using Error::Error;
};

class DegenerateDiagonalError : public Error {
 public:
  using Error::Error;
};

class DuplicateItemError : public Error {
 public:
  using Error::Error;
};

class IncompatibleMetricError : public Error {
 public:
  using Error::Error;
};

class UnknownCategoryError : public Error {
 public:
  using Error::Error;
};

class CorruptIndexError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sigrank

#endif  // SIGRANK_ERRORS_HPP
