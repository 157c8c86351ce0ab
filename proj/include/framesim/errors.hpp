// Copyright 2026 The framesim Authors
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

namespace framesim {

/// Malformed arguments: wrong dimensions, non-unitary gates, unknown parties.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A party attempted something the communication model does not allow it to do:
/// touching a qubit it does not hold, using another party's private observable,
/// or reading ground truth from inside a protocol.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Operation issued in the wrong phase of a session state machine.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An internal construction failed a precondition that should hold by theory.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace framesim
