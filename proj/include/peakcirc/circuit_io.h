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

#include <filesystem>
#include <iosfwd>

#include "peakcirc/circuit.h"

namespace peakcirc {

/*
 * Circuit file format, one token group per line, doubles as hex floats:
 *
 *   peakcirc-circuit 1
 *   n <qubits>
 *   tau_r <random layers>
 *   tau_p <peaking layers>
 *   parity continue|mirror
 *   seed <uint64>
 *   fixed <gate count>
 *   <32 hex doubles: row-major (re, im) pairs of one 4x4 gate>   x gate count
 *   theta <parameter count>
 *   <hex double>                                                 x parameter count
 *   end
 *
 * Layouts are not stored; they follow from (n, tau_r, tau_p, parity).
 */
void write_circuit(std::ostream &out, const PeakedCircuitInstance &instance);

/// Throws IntegrityError naming `source` and the offending field.
PeakedCircuitInstance read_circuit(std::istream &in, const std::string &source = "<stream>");

void save_circuit(const std::filesystem::path &path, const PeakedCircuitInstance &instance);
PeakedCircuitInstance load_circuit(const std::filesystem::path &path);

}  // namespace peakcirc
