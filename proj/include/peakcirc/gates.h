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

#include <array>
#include <random>
#include <span>

#include "peakcirc/state_vector.h"

namespace peakcirc {

/// Random stream used everywhere a seed is consumed.
using Rng = std::mt19937_64;

enum class GateKind { Fixed, Parameterized };

struct TwoQubitGate {
    Mat4 matrix = Mat4::Identity();
    GateKind kind = GateKind::Fixed;
};

inline constexpr std::size_t kKakParamCount = 15;

/**
 * Angles of U = (A1 x A2) exp(-i(x XX + y YY + z ZZ)) (B1 x B2).
 *
 * Layout: [A1 (3), A2 (3), B1 (3), B2 (3), x, y, z]. Each single-qubit frame is
 * Rz(e0) Ry(e1) Rz(e2) with R_P(t) = exp(-i t P / 2). A1 and B1 act on the
 * gate's first (more significant) qubit. Angles are unconstrained reals.
 */
struct KakParams {
    static constexpr std::size_t kA1 = 0, kA2 = 3, kB1 = 6, kB2 = 9, kX = 12, kY = 13, kZ = 14;
    std::array<double, kKakParamCount> angles{};
};

using KakSpan = std::span<const double, kKakParamCount>;

namespace pauli {
Mat2 I();
Mat2 X();
Mat2 Y();
Mat2 Z();
}  // namespace pauli

Mat4 kron(const Mat2 &a, const Mat2 &b);

/// Rz(a) Ry(b) Rz(c).
Mat2 euler_zyz(double a, double b, double c);

/// Max elementwise deviation of U^dagger U from the identity.
double unitarity_error(const Mat4 &u);

/// Haar-distributed U(4) element: QR of a complex Ginibre matrix with the R-diagonal phases folded into Q.
TwoQubitGate haar_random_unitary(Rng &rng);

/// Haar-distributed U(2) element, same construction.
Mat2 haar_random_unitary_2(Rng &rng);

TwoQubitGate kak_gate(KakSpan params);
inline TwoQubitGate kak_gate(const KakParams &params) {
    return kak_gate(KakSpan(params.angles));
}

/// dU/d(theta_k) for every k, in KakParams layout order.
std::array<Mat4, kKakParamCount> kak_gate_derivatives(KakSpan params);
inline std::array<Mat4, kKakParamCount> kak_gate_derivatives(const KakParams &params) {
    return kak_gate_derivatives(KakSpan(params.angles));
}

TwoQubitGate dagger(const TwoQubitGate &gate);

/**
 * Inverse of kak_gate: angles with kak_gate(result) = e^{i phi} u for some
 * global phase phi. Works through the magic basis, where local gates become
 * SO(4) and the XX/YY/ZZ core becomes diagonal. Throws StructuralError if the
 * reconstruction misses u by more than 1e-8 (should not happen for unitary input).
 */
KakParams kak_decompose(const Mat4 &u);

/// Max elementwise |u - e^{i phi} v| with phi the best-aligning global phase.
double phase_insensitive_distance(const Mat4 &u, const Mat4 &v);

}  // namespace peakcirc
