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

#include "peakcirc/circuit.h"

#include "peakcirc/errors.h"

namespace peakcirc {

std::size_t CircuitLayout::pair_count() const {
    std::size_t total = 0;
    for (const auto &layer : layers) {
        total += layer.size();
    }
    return total;
}

CircuitLayout brickwall_layout(int n, int depth, int first_parity) {
    if (n < 2 || n > kMaxQubits || n % 2 != 0) {
        throw SizeError("brick wall needs an even qubit count in [2, " + std::to_string(kMaxQubits) + "], got " +
                        std::to_string(n));
    }
    if (depth < 0) {
        throw SizeError("negative circuit depth " + std::to_string(depth));
    }
    CircuitLayout layout{n, {}};
    layout.layers.reserve(static_cast<std::size_t>(depth));
    for (int l = 0; l < depth; ++l) {
        std::vector<QubitPair> layer;
        for (int q = (first_parity + l) % 2; q + 1 < n; q += 2) {
            layer.push_back({q, q + 1});
        }
        layout.layers.push_back(std::move(layer));
    }
    return layout;
}

const char *to_string(PeakingParity parity) {
    return parity == PeakingParity::Continue ? "continue" : "mirror";
}

PeakingParity parse_peaking_parity(std::string_view text) {
    if (text == "continue") {
        return PeakingParity::Continue;
    }
    if (text == "mirror") {
        return PeakingParity::Mirror;
    }
    throw ParameterError("unknown peaking parity '" + std::string(text) + "'");
}

PeakedCircuitInstance::PeakedCircuitInstance(CircuitLayout layout_r, std::vector<Mat4> fixed_gates,
                                             std::uint64_t seed)
    : layout_r_(std::move(layout_r)), fixed_gates_(std::move(fixed_gates)), seed_(seed), layout_p_{layout_r_.n, {}} {
    if (fixed_gates_.size() != layout_r_.pair_count()) {
        throw ParameterError("expected " + std::to_string(layout_r_.pair_count()) + " fixed gates, got " +
                             std::to_string(fixed_gates_.size()));
    }
}

const Mat4 &PeakedCircuitInstance::fixed_gate(std::size_t layer, std::size_t pair) const {
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layer; ++l) {
        offset += layout_r_.layers[l].size();
    }
    if (layer >= layout_r_.depth() || pair >= layout_r_.layers[layer].size()) {
        throw IndexError("no fixed gate at layer " + std::to_string(layer) + ", pair " + std::to_string(pair));
    }
    return fixed_gates_[offset + pair];
}

void PeakedCircuitInstance::check_params(std::span<const double> theta) const {
    if (theta.size() != param_count()) {
        throw ParameterError("parameter vector has length " + std::to_string(theta.size()) + ", expected " +
                             std::to_string(param_count()));
    }
}

void PeakedCircuitInstance::set_params(std::vector<double> theta) {
    check_params(theta);
    params_ = std::move(theta);
}

int PeakedCircuitInstance::peaking_first_parity(PeakingParity parity) const {
    int last_random = (tau_r() - 1) % 2;
    if (tau_r() == 0) {
        return 0;
    }
    return parity == PeakingParity::Continue ? 1 - last_random : last_random;
}

PeakedCircuitInstance sample_random_circuit(int n, int tau_r, std::uint64_t seed) {
    CircuitLayout layout = brickwall_layout(n, tau_r);
    Rng rng(seed);
    std::vector<Mat4> gates;
    gates.reserve(layout.pair_count());
    for (std::size_t k = 0; k < layout.pair_count(); ++k) {
        gates.push_back(haar_random_unitary(rng).matrix);
    }
    return PeakedCircuitInstance(std::move(layout), std::move(gates), seed);
}

PeakedCircuitInstance attach_peaking_layers(const PeakedCircuitInstance &instance, int tau_p,
                                            std::vector<double> theta_init, PeakingParity parity) {
    if (instance.tau_p() != 0) {
        throw ParameterError("instance already carries " + std::to_string(instance.tau_p()) + " peaking layers");
    }
    if (tau_p < 0) {
        throw SizeError("negative peaking depth " + std::to_string(tau_p));
    }
    PeakedCircuitInstance out = instance;
    if (tau_p == 0) {
        if (!theta_init.empty()) {
            throw ParameterError("tau_p = 0 takes no parameters");
        }
        return out;
    }
    out.parity_ = parity;
    out.layout_p_ = brickwall_layout(instance.num_qubits(), tau_p, instance.peaking_first_parity(parity));
    out.set_params(std::move(theta_init));
    return out;
}

StateVector run_random_part(const PeakedCircuitInstance &instance) {
    StateVector state = zero_state(instance.num_qubits());
    std::size_t k = 0;
    for (const auto &layer : instance.layout_r().layers) {
        for (const auto &pair : layer) {
            apply_two_qubit_gate(state, instance.fixed_gates()[k++], pair.a, pair.b);
        }
    }
    return state;
}

void apply_peaking_layers(StateVector &state, const PeakedCircuitInstance &instance, std::span<const double> theta) {
    instance.check_params(theta);
    std::size_t offset = 0;
    for (const auto &layer : instance.layout_p().layers) {
        for (const auto &pair : layer) {
            Mat4 g = kak_gate(KakSpan(theta.subspan(offset, kKakParamCount))).matrix;
            apply_two_qubit_gate(state, g, pair.a, pair.b);
            offset += kKakParamCount;
        }
    }
}

StateVector run(const PeakedCircuitInstance &instance, std::span<const double> theta) {
    instance.check_params(theta);
    StateVector state = run_random_part(instance);
    apply_peaking_layers(state, instance, theta);
    return state;
}

std::vector<double> inverse_peaking_params(const PeakedCircuitInstance &instance) {
    if (instance.tau_p() > instance.tau_r()) {
        throw StructuralError("inverse needs tau_p <= tau_r");
    }
    std::vector<double> theta;
    theta.reserve(instance.param_count());
    for (int j = 0; j < instance.tau_p(); ++j) {
        auto mirrored = static_cast<std::size_t>(instance.tau_r() - 1 - j);
        const auto &pairs_p = instance.layout_p().layers[static_cast<std::size_t>(j)];
        if (pairs_p != instance.layout_r().layers[mirrored]) {
            throw StructuralError("peaking layer " + std::to_string(j) + " does not sit on the pairs of random layer " +
                                  std::to_string(mirrored) + "; the inverse needs PeakingParity::Mirror");
        }
        for (std::size_t p = 0; p < pairs_p.size(); ++p) {
            KakParams k = kak_decompose(instance.fixed_gate(mirrored, p).adjoint());
            theta.insert(theta.end(), k.angles.begin(), k.angles.end());
        }
    }
    return theta;
}

PeakWeight peak_weight(const StateVector &state, std::string_view s) {
    if (s.size() != static_cast<std::size_t>(state.num_qubits())) {
        throw ParameterError("bitstring of length " + std::to_string(s.size()) + " for " +
                             std::to_string(state.num_qubits()) + " qubits");
    }
    return {state.probability(bitstring_to_index(s)), std::string(s)};
}

PeakWeight max_peak(const StateVector &state) {
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        double p = state.probability(i);
        if (p > best_p) {
            best_p = p;
            best = i;
        }
    }
    return {best_p, index_to_bitstring(best, state.num_qubits())};
}

}  // namespace peakcirc
