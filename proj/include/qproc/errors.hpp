// Copyright 2026 The qproc developers
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

namespace qproc {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension or shape mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An object violates a physical validity constraint (positivity, trace
// conditions, normalization) beyond tolerance.
class ValidityError : public Error {
 public:
  using Error::Error;
};

// Objects that cannot be combined: region mismatches, broken dimension
// chains, instruments mixing regions.
class CompositionError : public Error {
 public:
  using Error::Error;
};

// Conditioning on an event of probability zero.
class UndefinedConditionalError : public Error {
 public:
  using Error::Error;
};

// Malformed scenario document.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Frame-function reconstruction cannot proceed (deficient spanning set,
// failed held-out validation).
class ReconstructionError : public Error {
 public:
  using Error::Error;
};

// An operation's precondition does not hold (e.g. an oracle failed its
// axiom checks).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace qproc
