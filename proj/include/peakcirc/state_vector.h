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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace peakcirc {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

/// Largest supported register. 2^26 amplitudes is 1 GiB of complex doubles.
inline constexpr int kMaxQubits = 26;

/**
 * Dense pure state on n qubits.
 *
 * Basis ordering: qubit 0 is the most significant bit of the basis index, so
 * for n = 3 the amplitude of |q0 q1 q2> = |100> lives at index 4. Every
 * bitstring read or written by this library uses the same convention.
 *
 * Two-qubit gates act on (q_a, q_b) with q_a the more significant bit of the
 * gate's 2-bit index: gate row/column 2*b_a + b_b.
 */
class StateVector {
  public:
    /// |0^n>. Throws SizeError unless 2 <= n <= kMaxQubits.
    explicit StateVector(int n);
    /// Takes ownership of explicit amplitudes; size must be a power of two >= 4.
    explicit StateVector(std::vector<cplx> amps);

    int num_qubits() const {
        return n_;
    }
    std::size_t size() const {
        return amps_.size();
    }
    std::span<const cplx> amps() const {
        return amps_;
    }
    std::span<cplx> amps() {
        return amps_;
    }
    const cplx &operator[](std::size_t i) const {
        return amps_[i];
    }
    cplx &operator[](std::size_t i) {
        return amps_[i];
    }

    double norm_squared() const;
    /// |amps[i]|^2.
    double probability(std::size_t index) const {
        return std::norm(amps_[index]);
    }
    /// Inner product <this|other>.
    cplx inner(const StateVector &other) const;

    bool operator==(const StateVector &other) const = default;

  private:
    int n_;
    std::vector<cplx> amps_;
};

StateVector zero_state(int n);

/// Applies a 4x4 matrix to qubits (q_a, q_b) in place. Throws IndexError on bad indices.
void apply_two_qubit_gate(StateVector &state, const Mat4 &gate, int q_a, int q_b);

/// Applies a 2x2 matrix to qubit q in place.
void apply_one_qubit_gate(StateVector &state, const Mat2 &gate, int q);

/**
 * Reduced "environment" of a pair of qubits between two states:
 *   E(a, b) = sum_rest conj(bra[rest, a]) * ket[rest, b]
 * so that <bra| G |ket> = sum_ab G(a, b) E(a, b) for any G placed on (q_a, q_b).
 */
Mat4 pair_environment(const StateVector &bra, const StateVector &ket, int q_a, int q_b);

/**
 * Fused reverse step of adjoint differentiation for a gate G on (q_a, q_b):
 * applies `inverse` (= G^dagger) to `ket` and `costate` in place and returns
 * pair_environment(costate before the update, ket after the update).
 */
Mat4 reverse_step(StateVector &ket, StateVector &costate, const Mat4 &inverse, int q_a, int q_b);

/// Converts a bitstring (qubit 0 first, characters '0'/'1') to a basis index.
std::uint64_t bitstring_to_index(std::string_view bits);
std::string index_to_bitstring(std::uint64_t index, int n);

}  // namespace peakcirc
