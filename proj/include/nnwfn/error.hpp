// Copyright 2026 The nnwfn Authors
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

namespace nnwfn {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class InvalidBlockSize : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A parameter constraint such as c > 2*sqrt(k) does not hold.
class ConstraintViolated : public Error {
 public:
  using Error::Error;
};

/// The planner could not produce a solvable leaf; carries the smallest c
/// (exclusive) for which the same plan would be feasible.
class Infeasible : public Error {
 public:
  Infeasible(const std::string& what, double minimal_c)
      : Error(what), minimal_c_(minimal_c) {}
  double minimal_c() const noexcept { return minimal_c_; }

 private:
  double minimal_c_;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class StaleSnapshot : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace nnwfn
