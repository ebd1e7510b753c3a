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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "peakcirc/gates.h"
#include "peakcirc/state_vector.h"

namespace peakcirc {

struct QubitPair {
    int a = 0;
    int b = 0;
    bool operator==(const QubitPair &) const = default;
};

/// Ordered layers of disjoint qubit pairs on n qubits.
struct CircuitLayout {
    int n = 0;
    std::vector<std::vector<QubitPair>> layers;

    std::size_t depth() const {
        return layers.size();
    }
    std::size_t pair_count() const;
    bool operator==(const CircuitLayout &) const = default;
};

/**
 * Open-boundary 1D brick wall. Layer l pairs (0,1),(2,3),... when
 * (first_parity + l) is even and (1,2),(3,4),... when odd; (n-1, 0) is never
 * paired. Throws SizeError for odd or too-small n and negative depth.
 */
CircuitLayout brickwall_layout(int n, int depth, int first_parity = 0);

/// Where the peaking brick wall starts relative to the last random layer.
enum class PeakingParity {
    /// First peaking layer has the opposite parity of the last random layer: one uniform brick wall.
    Continue,
    /// First peaking layer sits on the same pairs as the last random layer, so peaking layer j
    /// mirrors random layer tau_r - 1 - j and the exact inverse is reachable when tau_p >= tau_r.
    Mirror,
};

const char *to_string(PeakingParity parity);
PeakingParity parse_peaking_parity(std::string_view text);

/**
 * tau_r fixed Haar layers followed by tau_p parameterized KAK layers.
 *
 * Fixed gates never change after construction. The parameter vector holds
 * kKakParamCount angles per peaking pair, layer by layer in pair order.
 */
class PeakedCircuitInstance {
  public:
    PeakedCircuitInstance(CircuitLayout layout_r, std::vector<Mat4> fixed_gates, std::uint64_t seed);

    int num_qubits() const {
        return layout_r_.n;
    }
    int tau_r() const {
        return static_cast<int>(layout_r_.depth());
    }
    int tau_p() const {
        return static_cast<int>(layout_p_.depth());
    }
    std::uint64_t seed() const {
        return seed_;
    }
    PeakingParity parity() const {
        return parity_;
    }
    const CircuitLayout &layout_r() const {
        return layout_r_;
    }
    const CircuitLayout &layout_p() const {
        return layout_p_;
    }
    /// One matrix per random pair, flattened layer by layer.
    std::span<const Mat4> fixed_gates() const {
        return fixed_gates_;
    }
    const Mat4 &fixed_gate(std::size_t layer, std::size_t pair) const;
    std::span<const double> params() const {
        return params_;
    }
    std::size_t param_count() const {
        return layout_p_.pair_count() * kKakParamCount;
    }

    /// Throws ParameterError on length mismatch.
    void set_params(std::vector<double> theta);
    void check_params(std::span<const double> theta) const;

    /// Brick-wall parity (0 even, 1 odd) of the first peaking layer under `parity`.
    int peaking_first_parity(PeakingParity parity) const;

    friend PeakedCircuitInstance attach_peaking_layers(const PeakedCircuitInstance &, int, std::vector<double>,
                                                       PeakingParity);

  private:
    CircuitLayout layout_r_;
    std::vector<Mat4> fixed_gates_;
    std::uint64_t seed_;
    CircuitLayout layout_p_;
    std::vector<double> params_;
    PeakingParity parity_ = PeakingParity::Continue;
};

/// Independent Haar gate on every pair of a depth-tau_r brick wall, drawn from Rng(seed).
PeakedCircuitInstance sample_random_circuit(int n, int tau_r, std::uint64_t seed);

/**
 * Copy of `instance` with tau_p peaking layers and parameters theta_init.
 * Requires the instance to carry no peaking layers yet; tau_p = 0 returns it unchanged.
 */
PeakedCircuitInstance attach_peaking_layers(const PeakedCircuitInstance &instance, int tau_p,
                                            std::vector<double> theta_init,
                                            PeakingParity parity = PeakingParity::Continue);

/// State after the random layers only.
StateVector run_random_part(const PeakedCircuitInstance &instance);

/// Applies the peaking layers with parameters theta to `state` in place.
void apply_peaking_layers(StateVector &state, const PeakedCircuitInstance &instance, std::span<const double> theta);

/// C(theta)|0^n>.
StateVector run(const PeakedCircuitInstance &instance, std::span<const double> theta);
inline StateVector run(const PeakedCircuitInstance &instance) {
    return run(instance, instance.params());
}

/**
 * Angles that make each peaking gate the exact inverse of the random gate it
 * mirrors (last random layer first). Needs PeakingParity::Mirror and
 * tau_p <= tau_r; otherwise throws StructuralError.
 */
std::vector<double> inverse_peaking_params(const PeakedCircuitInstance &instance);

struct PeakWeight {
    double value = 0.0;
    std::string target;
};

/// |<s|psi>|^2 for bitstring s (qubit 0 first). Throws ParameterError on length mismatch.
PeakWeight peak_weight(const StateVector &state, std::string_view s);

/// Largest output probability; ties go to the smallest basis index.
PeakWeight max_peak(const StateVector &state);

}  // namespace peakcirc
