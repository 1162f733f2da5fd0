// Copyright 2026 The bornsim Authors
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

namespace bornsim {

// All library failures derive from Error so callers (the CLI in particular)
// can separate scenario errors from programming errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// efficiency() at gamma == 0.
class SingularThreshold : public Error {
 public:
  using Error::Error;
};

// outcome_distribution() beyond the 2^d enumeration cap.
class EnumerationLimit : public Error {
 public:
  using Error::Error;
};

// Post-selected probability whose conditioning event has probability zero.
class UndefinedConditional : public Error {
 public:
  using Error::Error;
};

// Coincidence ratio with a vanishing single-count probability.
class UndefinedRatio : public Error {
 public:
  using Error::Error;
};

// Some mode crosses threshold with probability one, so single-detection
// post-selection is empty.
class SaturatedDetector : public Error {
 public:
  using Error::Error;
};

}  // namespace bornsim
