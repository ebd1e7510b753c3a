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
#include <vector>

#include "peakcirc/circuit.h"

namespace peakcirc {

/**
 * psi = (u_a x u_b)(alpha |00> + beta |11>) with alpha >= beta >= 0.
 *
 * Phase convention: the first nonzero entry of every column of u_a is real
 * and positive, which makes the form unique for non-degenerate spectra.
 */
struct SchmidtForm {
    double alpha = 1.0;
    double beta = 0.0;
    Mat2 u_a = Mat2::Identity();
    Mat2 u_b = Mat2::Identity();

    Eigen::Vector4cd reconstruct() const;
};

/// Schmidt decomposition of a normalized two-qubit state (index 2*b_a + b_b).
SchmidtForm schmidt_two_qubit(const Eigen::Vector4cd &state);

struct PlacedPairGate {
    QubitPair pair;
    Mat4 matrix;
};

struct PlacedSingleGate {
    int qubit = 0;
    Mat2 matrix;
};

/**
 * The peaking layer P = (prod U_{2i}^dag U_{2i+1}^dag) R2^{-1} for a two-layer
 * random brick wall R2 R1, with the single-qubit Schmidt frames merged into
 * the inverse gates of R2 wherever they share qubits.
 *
 * For n >= 4 the result sits on R2's (odd) pairs plus single-qubit gates on
 * the boundary qubits 0 and n-1: one layer of disjoint gates, but not a
 * brick-wall layer of either parity. `fits_brickwall` reports this.
 */
struct AnalyticPeakingLayer {
    int n = 0;
    std::vector<PlacedPairGate> pair_gates;
    std::vector<PlacedSingleGate> single_gates;
    /// Schmidt forms of R1's blocks, block i on qubits (2i, 2i+1).
    std::vector<SchmidtForm> schmidt;

    /// Every qubit is touched by at most one gate.
    bool is_single_layer() const;
    /// True when the layer is exactly one brick-wall layer of the given parity (no single-qubit gates).
    bool fits_brickwall(int parity) const;
    /// Throws StructuralError unless fits_brickwall(parity).
    void require_brickwall(int parity) const;

    /// prod_i alpha_i^2, the predicted weight of 0^n after the layer.
    double predicted_peak_weight() const;
    void apply(StateVector &state) const;
};

/// R1 is the even layer's gates (n/2 of them), R2 the odd layer's (n/2 - 1).
AnalyticPeakingLayer analytic_peaking_layer(int n, std::span<const Mat4> r1, std::span<const Mat4> r2);
/// Same, from an instance with tau_r = 2.
AnalyticPeakingLayer analytic_peaking_layer(const PeakedCircuitInstance &instance);

/// E[max_i |U_0i|^2] over Haar U(d): (1/d) sum_{k=1}^{d} 1/k.
double haar_mean_max_weight(int d);
/// (25/48)^{n/2}: mean max-peak after one random brick-wall layer.
double single_layer_peak_law(int n);
/// (7/8)^{n/2}: mean peak weight after the analytic peaking layer.
double analytic_peaking_law(int n);

struct BruteForceConfig {
    /// Number of starting configurations ("grid" points): identity, mirrored inverse, then Haar draws.
    int starts = 16;
    int max_sweeps = 2000;
    double tol = 1e-13;
    std::uint64_t seed = 1;
};

struct BruteForceResult {
    double delta = 0.0;
    /// Winning peaking gates, flattened layer by layer.
    std::vector<Mat4> gates;
};

/**
 * Lower bound on max over peaking gates of |<0^n| P C_r |0^n>|^2, searching
 * all of U(4) per gate without any gate parameterization: from each start,
 * sweep the gates and replace each one by the unitary that maximizes the
 * overlap with the others held fixed (polar factor of its environment).
 *
 * tau_p = 0 returns the instance's max-peak value. For tiny n only (n <= 8).
 */
BruteForceResult brute_force_max_peak(const PeakedCircuitInstance &instance, int tau_p, PeakingParity parity,
                                      const BruteForceConfig &config = {});

}  // namespace peakcirc
