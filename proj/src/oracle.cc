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

#include "peakcirc/oracle.h"

#include <cmath>
#include <string>

#include "peakcirc/errors.h"

namespace peakcirc {

Eigen::Vector4cd SchmidtForm::reconstruct() const {
    Eigen::Vector4cd out = Eigen::Vector4cd::Zero();
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            out(2 * a + b) = alpha * u_a(a, 0) * u_b(b, 0) + beta * u_a(a, 1) * u_b(b, 1);
        }
    }
    return out;
}

SchmidtForm schmidt_two_qubit(const Eigen::Vector4cd &state) {
    Mat2 m;
    m << state(0), state(1), state(2), state(3);
    Eigen::JacobiSVD<Mat2> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    // m = U S V^dagger, so psi = sum_k s_k U_k (x) conj(V_k).
    SchmidtForm out;
    out.alpha = svd.singularValues()(0);
    out.beta = svd.singularValues()(1);
    out.u_a = svd.matrixU();
    out.u_b = svd.matrixV().conjugate();
    for (int k = 0; k < 2; ++k) {
        int lead = std::abs(out.u_a(0, k)) > 1e-14 ? 0 : 1;
        cplx phase = out.u_a(lead, k) / std::abs(out.u_a(lead, k));
        out.u_a.col(k) *= std::conj(phase);
        out.u_b.col(k) *= phase;
    }
    return out;
}

bool AnalyticPeakingLayer::is_single_layer() const {
    std::vector<int> uses(static_cast<std::size_t>(n), 0);
    for (const auto &g : pair_gates) {
        ++uses[static_cast<std::size_t>(g.pair.a)];
        ++uses[static_cast<std::size_t>(g.pair.b)];
    }
    for (const auto &g : single_gates) {
        ++uses[static_cast<std::size_t>(g.qubit)];
    }
    for (int u : uses) {
        if (u > 1) {
            return false;
        }
    }
    return true;
}

bool AnalyticPeakingLayer::fits_brickwall(int parity) const {
    if (!single_gates.empty()) {
        return false;
    }
    const CircuitLayout layout = brickwall_layout(n, 1, parity);
    const auto &expected = layout.layers[0];
    if (expected.size() != pair_gates.size()) {
        return false;
    }
    for (std::size_t k = 0; k < expected.size(); ++k) {
        if (!(expected[k] == pair_gates[k].pair)) {
            return false;
        }
    }
    return true;
}

void AnalyticPeakingLayer::require_brickwall(int parity) const {
    if (!fits_brickwall(parity)) {
        std::string why = is_single_layer() ? "its gates are disjoint but sit on R2's pairs plus " +
                                                  std::to_string(single_gates.size()) + " boundary single-qubit gates"
                                            : "its gates overlap";
        throw StructuralError("analytic peaking layer is not one " + std::string(parity % 2 ? "odd" : "even") +
                              " brick-wall layer: " + why);
    }
}

double AnalyticPeakingLayer::predicted_peak_weight() const {
    double w = 1.0;
    for (const auto &s : schmidt) {
        w *= s.alpha * s.alpha;
    }
    return w;
}

void AnalyticPeakingLayer::apply(StateVector &state) const {
    for (const auto &g : pair_gates) {
        apply_two_qubit_gate(state, g.matrix, g.pair.a, g.pair.b);
    }
    for (const auto &g : single_gates) {
        apply_one_qubit_gate(state, g.matrix, g.qubit);
    }
}

AnalyticPeakingLayer analytic_peaking_layer(int n, std::span<const Mat4> r1, std::span<const Mat4> r2) {
    if (n < 2 || n % 2 != 0) {
        throw SizeError("analytic peaking layer needs even n >= 2");
    }
    const auto half = static_cast<std::size_t>(n / 2);
    if (r1.size() != half || r2.size() != half - 1) {
        throw ParameterError("expected " + std::to_string(half) + " R1 gates and " + std::to_string(half - 1) +
                             " R2 gates");
    }
    AnalyticPeakingLayer out;
    out.n = n;
    std::vector<Mat2> frames_dag(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < half; ++i) {
        SchmidtForm s = schmidt_two_qubit(r1[i].col(0));
        frames_dag[2 * i] = s.u_a.adjoint();
        frames_dag[2 * i + 1] = s.u_b.adjoint();
        out.schmidt.push_back(s);
    }
    std::vector<bool> covered(static_cast<std::size_t>(n), false);
    for (std::size_t j = 0; j < r2.size(); ++j) {
        std::size_t q = 2 * j + 1;
        out.pair_gates.push_back(
            {{static_cast<int>(q), static_cast<int>(q + 1)}, kron(frames_dag[q], frames_dag[q + 1]) * r2[j].adjoint()});
        covered[q] = covered[q + 1] = true;
    }
    std::vector<int> loose;
    for (int q = 0; q < n; ++q) {
        if (!covered[static_cast<std::size_t>(q)]) {
            loose.push_back(q);
        }
    }
    // Adjacent uncovered qubits (only n = 2) merge into one two-qubit gate.
    for (std::size_t k = 0; k < loose.size(); ++k) {
        int q = loose[k];
        if (k + 1 < loose.size() && loose[k + 1] == q + 1) {
            auto uq = static_cast<std::size_t>(q);
            out.pair_gates.push_back({{q, q + 1}, kron(frames_dag[uq], frames_dag[uq + 1])});
            ++k;
        } else {
            out.single_gates.push_back({q, frames_dag[static_cast<std::size_t>(q)]});
        }
    }
    if (!out.is_single_layer()) {
        throw StructuralError("analytic peaking layer does not collapse to one layer of disjoint gates");
    }
    return out;
}

AnalyticPeakingLayer analytic_peaking_layer(const PeakedCircuitInstance &instance) {
    if (instance.tau_r() != 2 || instance.tau_p() != 0) {
        throw ParameterError("analytic peaking layer needs tau_r = 2 and no peaking layers");
    }
    auto gates = instance.fixed_gates();
    std::size_t first = instance.layout_r().layers[0].size();
    return analytic_peaking_layer(instance.num_qubits(), gates.subspan(0, first), gates.subspan(first));
}

double haar_mean_max_weight(int d) {
    double sum = 0.0;
    for (int k = 1; k <= d; ++k) {
        sum += 1.0 / k;
    }
    return sum / d;
}

double single_layer_peak_law(int n) {
    return std::pow(25.0 / 48.0, n / 2.0);
}

double analytic_peaking_law(int n) {
    return std::pow(7.0 / 8.0, n / 2.0);
}

namespace {

// Unitary G maximizing |sum_ab G(a,b) E(a,b)| = |tr(G E^T)|.
Mat4 best_unitary_for_environment(const Mat4 &env) {
    Eigen::JacobiSVD<Mat4> svd(env.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixV() * svd.matrixU().adjoint();
}

double overlap_weight(const StateVector &random_output, const CircuitLayout &layout, const std::vector<Mat4> &gates) {
    StateVector state = random_output;
    std::size_t k = 0;
    for (const auto &layer : layout.layers) {
        for (const auto &pair : layer) {
            apply_two_qubit_gate(state, gates[k++], pair.a, pair.b);
        }
    }
    return state.probability(0);
}

}  // namespace

BruteForceResult brute_force_max_peak(const PeakedCircuitInstance &instance, int tau_p, PeakingParity parity,
                                      const BruteForceConfig &config) {
    if (instance.num_qubits() > 8) {
        throw SizeError("brute-force search is limited to n <= 8");
    }
    if (instance.tau_p() != 0) {
        throw ParameterError("brute-force search expects an instance without peaking layers");
    }
    const StateVector random_output = run_random_part(instance);
    BruteForceResult best;
    if (tau_p == 0) {
        best.delta = max_peak(random_output).value;
        return best;
    }
    const CircuitLayout layout =
        brickwall_layout(instance.num_qubits(), tau_p, instance.peaking_first_parity(parity));
    std::vector<QubitPair> flat_pairs;
    for (const auto &layer : layout.layers) {
        flat_pairs.insert(flat_pairs.end(), layer.begin(), layer.end());
    }
    const std::size_t count = flat_pairs.size();

    // Gate that undoes the mirrored random gate, where the pairs line up.
    std::vector<Mat4> mirrored(count, Mat4::Identity());
    {
        std::size_t k = 0;
        for (std::size_t j = 0; j < layout.depth(); ++j) {
            int r = instance.tau_r() - 1 - static_cast<int>(j);
            for (std::size_t p = 0; p < layout.layers[j].size(); ++p, ++k) {
                if (r >= 0 && layout.layers[j] == instance.layout_r().layers[static_cast<std::size_t>(r)]) {
                    mirrored[k] = instance.fixed_gate(static_cast<std::size_t>(r), p).adjoint();
                }
            }
        }
    }

    Rng rng(config.seed);
    best.delta = -1.0;
    for (int start = 0; start < std::max(config.starts, 1); ++start) {
        std::vector<Mat4> gates(count, Mat4::Identity());
        if (start == 1) {
            gates = mirrored;
        } else if (start > 1) {
            for (auto &g : gates) {
                g = haar_random_unitary(rng).matrix;
            }
        }
        double current = overlap_weight(random_output, layout, gates);
        for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
            for (std::size_t g = 0; g < count; ++g) {
                StateVector ket = random_output;
                for (std::size_t k = 0; k < g; ++k) {
                    apply_two_qubit_gate(ket, gates[k], flat_pairs[k].a, flat_pairs[k].b);
                }
                StateVector costate = zero_state(instance.num_qubits());
                for (std::size_t k = count; k-- > g + 1;) {
                    apply_two_qubit_gate(costate, gates[k].adjoint(), flat_pairs[k].a, flat_pairs[k].b);
                }
                gates[g] = best_unitary_for_environment(pair_environment(costate, ket, flat_pairs[g].a, flat_pairs[g].b));
            }
            double next = overlap_weight(random_output, layout, gates);
            bool done = next - current <= config.tol * std::max(next, 1e-300);
            current = std::max(current, next);
            if (done) {
                break;
            }
        }
        if (current > best.delta) {
            best.delta = current;
            best.gates = gates;
        }
    }
    return best;
}

}  // namespace peakcirc
