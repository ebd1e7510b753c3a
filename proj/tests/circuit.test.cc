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

#include <gtest/gtest.h>

#include <sstream>

#include "peakcirc/circuit_io.h"
#include "peakcirc/errors.h"

using namespace peakcirc;

namespace {

using Dense = Eigen::MatrixXcd;

// Full 2^n operator of a gate on adjacent qubits (a, a+1), qubit 0 most significant.
Dense embed(int n, int a, const Mat4 &g) {
    Dense left = Dense::Identity(1 << a, 1 << a);
    Dense right = Dense::Identity(1 << (n - a - 2), 1 << (n - a - 2));
    Dense mid = g;
    Dense lm(left.rows() * 4, left.cols() * 4);
    for (int i = 0; i < left.rows(); ++i)
        for (int j = 0; j < left.cols(); ++j) lm.block(i * 4, j * 4, 4, 4) = left(i, j) * mid;
    Dense out(lm.rows() * right.rows(), lm.cols() * right.cols());
    for (int i = 0; i < lm.rows(); ++i)
        for (int j = 0; j < lm.cols(); ++j)
            out.block(i * right.rows(), j * right.cols(), right.rows(), right.cols()) = lm(i, j) * right;
    return out;
}

std::vector<double> random_theta(std::size_t size, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> angle(-3, 3);
    std::vector<double> theta(size);
    for (auto &t : theta) t = angle(rng);
    return theta;
}

}  // namespace

TEST(BrickwallLayout, alternating_parity) {
    CircuitLayout l = brickwall_layout(6, 3);
    ASSERT_EQ(l.depth(), 3u);
    EXPECT_EQ(l.layers[0], (std::vector<QubitPair>{{0, 1}, {2, 3}, {4, 5}}));
    EXPECT_EQ(l.layers[1], (std::vector<QubitPair>{{1, 2}, {3, 4}}));
    EXPECT_EQ(l.layers[2], l.layers[0]);
    EXPECT_EQ(l.pair_count(), 8u);
    EXPECT_EQ(brickwall_layout(6, 1, 1).layers[0], l.layers[1]);
    EXPECT_EQ(brickwall_layout(2, 2).layers[1].size(), 0u);
}

TEST(BrickwallLayout, rejects_bad_sizes) {
    EXPECT_THROW(brickwall_layout(5, 2), SizeError);
    EXPECT_THROW(brickwall_layout(0, 2), SizeError);
    EXPECT_THROW(brickwall_layout(4, -1), SizeError);
}

TEST(SampleRandomCircuit, seeded_and_unitary) {
    auto a = sample_random_circuit(6, 4, 7);
    auto b = sample_random_circuit(6, 4, 7);
    auto c = sample_random_circuit(6, 4, 8);
    ASSERT_EQ(a.fixed_gates().size(), a.layout_r().pair_count());
    for (std::size_t k = 0; k < a.fixed_gates().size(); ++k) {
        EXPECT_EQ(a.fixed_gates()[k], b.fixed_gates()[k]);
        EXPECT_LT(unitarity_error(a.fixed_gates()[k]), 1e-10);
    }
    EXPECT_NE(a.fixed_gates()[0], c.fixed_gates()[0]);
    EXPECT_EQ(a.tau_r(), 4);
    EXPECT_EQ(a.tau_p(), 0);
}

TEST(Run, matches_dense_operator_product) {
    const int n = 4;
    for (auto parity : {PeakingParity::Continue, PeakingParity::Mirror}) {
        auto base = sample_random_circuit(n, 3, 11);
        auto peaked = attach_peaking_layers(base, 2, random_theta(3 * kKakParamCount, 5),
                                            parity);
        ASSERT_EQ(peaked.param_count(), 3 * kKakParamCount);
        Dense u = Dense::Identity(16, 16);
        std::size_t k = 0;
        for (const auto &layer : peaked.layout_r().layers)
            for (const auto &p : layer) u = embed(n, p.a, peaked.fixed_gates()[k++]) * u;
        k = 0;
        for (const auto &layer : peaked.layout_p().layers)
            for (const auto &p : layer) {
                u = embed(n, p.a, kak_gate(KakSpan(peaked.params().subspan(k, kKakParamCount)).first<kKakParamCount>()).matrix) * u;
                k += kKakParamCount;
            }
        StateVector s = run(peaked);
        for (int i = 0; i < 16; ++i) EXPECT_LT(std::abs(s[i] - u(i, 0)), 1e-12);
    }
}

TEST(Run, mirror_parity_starts_on_last_random_pairs) {
    auto base = sample_random_circuit(6, 3, 1);
    auto cont = attach_peaking_layers(base, 1, std::vector<double>(2 * kKakParamCount), PeakingParity::Continue);
    auto mirr = attach_peaking_layers(base, 1, std::vector<double>(3 * kKakParamCount), PeakingParity::Mirror);
    EXPECT_EQ(cont.layout_p().layers[0], base.layout_r().layers[1]);
    EXPECT_EQ(mirr.layout_p().layers[0], base.layout_r().layers[2]);
    EXPECT_THROW(attach_peaking_layers(base, 1, std::vector<double>(4), PeakingParity::Continue), ParameterError);
}

TEST(Run, exact_inverse_concentrates_on_zero) {
    auto base = sample_random_circuit(8, 6, 3);
    auto peaked = attach_peaking_layers(base, 6, std::vector<double>(base.layout_r().pair_count() * kKakParamCount),
                                        PeakingParity::Mirror);
    StateVector s = run(peaked, inverse_peaking_params(peaked));
    EXPECT_NEAR(s.probability(0), 1.0, 1e-8);

    auto cont = attach_peaking_layers(base, 6, std::vector<double>(base.layout_r().pair_count() * kKakParamCount),
                                      PeakingParity::Continue);
    EXPECT_THROW(inverse_peaking_params(cont), StructuralError);
}

TEST(Run, zero_angles_leave_random_output) {
    auto base = sample_random_circuit(6, 4, 9);
    auto peaked = attach_peaking_layers(base, 2, std::vector<double>(5 * kKakParamCount));
    StateVector a = run_random_part(base), b = run(peaked);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-12);
}

TEST(PeakWeight, reads_named_and_maximal_strings) {
    StateVector s({{0.6, 0}, {0, 0}, {0, 0.8}, {0, 0}});
    EXPECT_NEAR(peak_weight(s, "00").value, 0.36, 1e-15);
    EXPECT_NEAR(peak_weight(s, "10").value, 0.64, 1e-15);
    PeakWeight m = max_peak(s);
    EXPECT_NEAR(m.value, 0.64, 1e-15);
    EXPECT_EQ(m.target, "10");
    EXPECT_THROW(peak_weight(s, "0"), ParameterError);
    StateVector tie({{std::sqrt(0.5), 0}, {0, 0}, {0, 0}, {std::sqrt(0.5), 0}});
    EXPECT_EQ(max_peak(tie).target, "00");
}

TEST(CircuitIo, round_trip_is_bit_exact) {
    auto base = sample_random_circuit(6, 5, 21);
    auto peaked = attach_peaking_layers(base, 2, random_theta(5 * kKakParamCount, 3), PeakingParity::Mirror);
    std::stringstream ss;
    write_circuit(ss, peaked);
    PeakedCircuitInstance back = read_circuit(ss);
    EXPECT_EQ(back.seed(), peaked.seed());
    EXPECT_EQ(back.parity(), PeakingParity::Mirror);
    EXPECT_EQ(back.layout_p(), peaked.layout_p());
    ASSERT_EQ(back.params().size(), peaked.params().size());
    for (std::size_t k = 0; k < back.params().size(); ++k) EXPECT_EQ(back.params()[k], peaked.params()[k]);
    for (std::size_t k = 0; k < back.fixed_gates().size(); ++k) EXPECT_EQ(back.fixed_gates()[k], peaked.fixed_gates()[k]);
}

TEST(CircuitIo, truncation_is_an_integrity_error) {
    auto base = sample_random_circuit(4, 2, 1);
    std::stringstream ss;
    write_circuit(ss, base);
    std::string text = ss.str();
    for (std::size_t cut : {text.size() / 3, text.size() / 2, text.size() - 5}) {
        std::stringstream partial(text.substr(0, cut));
        EXPECT_THROW(read_circuit(partial), IntegrityError) << cut;
    }
}

TEST(Run, empty_circuit_is_zero_state) {
    auto inst = sample_random_circuit(4, 0, 1);
    StateVector s = run(inst);
    EXPECT_EQ(s, zero_state(4));
}

TEST(Run, inserted_gate_dagger_pairs_cancel) {
    auto base = sample_random_circuit(6, 4, 31);
    StateVector s = run_random_part(base);
    StateVector t = s;
    Rng rng(5);
    for (int k = 0; k < 20; ++k) {
        Mat4 g = haar_random_unitary(rng).matrix;
        int a = k % 5;
        apply_two_qubit_gate(t, g, a, a + 1);
        apply_two_qubit_gate(t, g.adjoint(), a, a + 1);
    }
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LT(std::abs(s[i] - t[i]), 1e-9);
}

TEST(PeakWeight, uniform_superposition_and_lower_bound) {
    const int n = 6;
    const double r = std::sqrt(0.5);
    Mat4 hh = kron(Mat2{{r, r}, {r, -r}}, Mat2{{r, r}, {r, -r}});
    StateVector s = zero_state(n);
    for (int q = 0; q < n; q += 2) apply_two_qubit_gate(s, hh, q, q + 1);
    EXPECT_NEAR(max_peak(s).value, 1.0 / 64, 1e-15);
    EXPECT_EQ(max_peak(s).target, "000000");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EXPECT_GE(max_peak(run_random_part(sample_random_circuit(n, 6, seed))).value, 1.0 / 64);
        EXPECT_LE(max_peak(run_random_part(sample_random_circuit(4, 2, seed))).value, 1.0);
    }
}
