// Copyright 2026 The twopath Authors
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

#ifndef TWOPATH_ERRORS_H
#define TWOPATH_ERRORS_H

#include <stdexcept>
#include <string>

namespace twopath {

/// Base class for every error raised by the simulator.
class SimulationError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// An operator expected to be unitary failed the unitarity check.
class NonUnitaryOperator : public SimulationError {
 public:
    using SimulationError::SimulationError;
};

/// A density matrix violated Hermiticity, unit trace or positivity.
class InvalidState : public SimulationError {
 public:
    using SimulationError::SimulationError;
};

/// Two operators could not be compared up to phase (V^dag U vanishes).
class Incomparable : public SimulationError {
 public:
    using SimulationError::SimulationError;
};

/// A sequence containing a gradient crusher was compiled to a unitary.
class NonUnitarySequence : public SimulationError {
 public:
    using SimulationError::SimulationError;
};

class NoSolution : public SimulationError {
 public:
    using SimulationError::SimulationError;
};

class DegenerateInput : public SimulationError {
 public:
    using SimulationError::SimulationError;
};

class IllConditioned : public SimulationError {
 public:
    using SimulationError::SimulationError;
};

class DegenerateSignal : public SimulationError {
 public:
    using SimulationError::SimulationError;
};

/// Malformed text input (pulse sequences, datasets, configs).
class ParseError : public SimulationError {
 public:
    using SimulationError::SimulationError;
};

}  // namespace twopath

#endif  // TWOPATH_ERRORS_H
