// Copyright 2026 The peakcirc Authors
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

namespace peakcirc {

/// Qubit count or layout size is not supported (e.g. n < 2, odd n for a brick wall).
struct SizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Qubit indices are equal or out of range.
struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Parameter vector or bitstring length does not match the circuit.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (e.g. log of a nonpositive value).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A gate construction could not be realized in the requested circuit shape.
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Experiment manifest failed validation. The message lists every offending field.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A persisted file is missing, truncated or inconsistent.
struct IntegrityError : std::runtime_error {
    IntegrityError(const std::string &file, const std::string &field, const std::string &what)
        : std::runtime_error(file + ": " + field + ": " + what), file_(file), field_(field) {
    }
    const std::string &file() const {
        return file_;
    }
    const std::string &field() const {
        return field_;
    }

  private:
    std::string file_;
    std::string field_;
};

}  // namespace peakcirc
