// Copyright 2026 The MaestroCut Authors
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

namespace maestrocut {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A vertex has no block, or an assignment references a block out of range.
class AssignmentError : public Error {
  public:
    using Error::Error;
};

/// Parameters are inconsistent (zero cut budget, invalid weights, ...).
class ConfigurationError : public Error {
  public:
    using Error::Error;
};

/// A requested move or plan would violate caps or the cut budget.
class FeasibilityError : public Error {
  public:
    using Error::Error;
};

/// No solution exists under the given caps or budget.
class InfeasibilityError : public Error {
  public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

class CalibrationError : public Error {
  public:
    using Error::Error;
};

class DegenerateGainError : public Error {
  public:
    using Error::Error;
};

class DistanceError : public Error {
  public:
    using Error::Error;
};

class NumericError : public Error {
  public:
    using Error::Error;
};

class FitError : public Error {
  public:
    using Error::Error;
};

class AuthenticationError : public Error {
  public:
    using Error::Error;
};

class ProtocolError : public Error {
  public:
    using Error::Error;
};

class PairingError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

} // namespace maestrocut
