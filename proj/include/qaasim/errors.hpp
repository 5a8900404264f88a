// Copyright 2026 The qaasim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAASIM_ERRORS_HPP
#define QAASIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qaasim {

// Input file or JSON payload is malformed.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Instance generation exhausted its restart budget.
struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

// The final Hamiltonian has no unique ground state.
struct DegenerateGroundState : std::runtime_error {
    explicit DegenerateGroundState(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested problem size exceeds what dense simulation supports.
struct ResourceLimitError : std::runtime_error {
    explicit ResourceLimitError(const std::string& msg) : std::runtime_error(msg) {}
};

// Speedup ratio requested against a zero baseline fidelity.
struct UndefinedSpeedupError : std::runtime_error {
    explicit UndefinedSpeedupError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qaasim

#endif
