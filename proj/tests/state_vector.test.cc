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

#include "peakcirc/state_vector.h"

#include <gtest/gtest.h>

#include <random>

#include "peakcirc/errors.h"
#include "peakcirc/gates.h"

using namespace peakcirc;

namespace {

Mat4 cnot() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

Mat4 swap_gate() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    return m;
}

StateVector basis_state(int n, std::string_view bits) {
    StateVector s(n);
    s[0] = 0.0;
    s[bitstring_to_index(bits)] = 1.0;
    return s;
}

StateVector random_state(int n, Rng &rng) {
    std::normal_distribution<double> normal;
    std::vector<cplx> amps(std::size_t{1} << n);
    double total = 0;
    for (auto &a : amps) {
        a = {normal(rng), normal(rng)};
        total += std::norm(a);
    }
    for (auto &a : amps) {
        a /= std::sqrt(total);
    }
    return StateVector(std::move(amps));
}

}  // namespace

TEST(StateVector, zero_state) {
    StateVector s = zero_state(2);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s[0], cplx(1.0, 0.0));
    EXPECT_EQ(s[1], cplx(0.0, 0.0));
    EXPECT_EQ(s[2], cplx(0.0, 0.0));
    EXPECT_EQ(s[3], cplx(0.0, 0.0));

    StateVector s3 = zero_state(3);
    EXPECT_EQ(s3.size(), 8u);
    EXPECT_DOUBLE_EQ(s3.norm_squared(), 1.0);
    EXPECT_EQ(s3[0], cplx(1.0, 0.0));

    EXPECT_THROW(zero_state(1), SizeError);
    EXPECT_THROW(zero_state(kMaxQubits + 1), SizeError);
    EXPECT_THROW(StateVector(std::vector<cplx>(6)), SizeError);
}

TEST(StateVector, cnot_truth_table) {
    StateVector s = basis_state(2, "10");
    apply_two_qubit_gate(s, cnot(), 0, 1);
    EXPECT_EQ(s, basis_state(2, "11"));

    // Control is always q_a, whatever the qubit order.
    StateVector t = basis_state(3, "001");
    apply_two_qubit_gate(t, cnot(), 2, 0);
    EXPECT_EQ(t, basis_state(3, "101"));
    StateVector u = basis_state(3, "100");
    apply_two_qubit_gate(u, cnot(), 2, 0);
    EXPECT_EQ(u, basis_state(3, "100"));
}

TEST(StateVector, swap_and_identity) {
    StateVector s = basis_state(2, "01");
    apply_two_qubit_gate(s, swap_gate(), 0, 1);
    EXPECT_EQ(s, basis_state(2, "10"));

    Rng rng(7);
    StateVector r = random_state(5, rng);
    StateVector before = r;
    apply_two_qubit_gate(r, Mat4::Identity(), 1, 3);
    EXPECT_EQ(r, before);
}

TEST(StateVector, bad_qubit_indices) {
    StateVector s(4);
    EXPECT_THROW(apply_two_qubit_gate(s, cnot(), 1, 1), IndexError);
    EXPECT_THROW(apply_two_qubit_gate(s, cnot(), 0, 4), IndexError);
    EXPECT_THROW(apply_two_qubit_gate(s, cnot(), -1, 2), IndexError);
    EXPECT_THROW(apply_one_qubit_gate(s, Mat2::Identity(), 4), IndexError);
}

TEST(StateVector, norm_preserved_over_long_random_sequence) {
    Rng rng(11);
    StateVector s(12);
    std::uniform_int_distribution<int> qubit(0, 11);
    for (int k = 0; k < 1000; ++k) {
        int a = qubit(rng);
        int b = qubit(rng);
        if (a == b) {
            b = (a + 1) % 12;
        }
        apply_two_qubit_gate(s, haar_random_unitary(rng).matrix, a, b);
    }
    EXPECT_LT(std::abs(s.norm_squared() - 1.0), 1e-8);
}

TEST(StateVector, gate_then_dagger_restores) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        StateVector s = random_state(6, rng);
        StateVector before = s;
        TwoQubitGate g = haar_random_unitary(rng);
        int a = trial % 6, b = (trial * 5 + 1) % 6;
        if (a == b) {
            b = (b + 1) % 6;
        }
        apply_two_qubit_gate(s, g.matrix, a, b);
        apply_two_qubit_gate(s, dagger(g).matrix, a, b);
        for (std::size_t i = 0; i < s.size(); ++i) {
            EXPECT_LT(std::abs(s[i] - before[i]), 1e-10);
        }
    }
}

TEST(StateVector, pair_environment_contracts_to_matrix_element) {
    Rng rng(5);
    for (auto [a, b] : {std::pair{0, 1}, {3, 1}, {2, 4}}) {
        StateVector bra = random_state(5, rng);
        StateVector ket = random_state(5, rng);
        Mat4 g = haar_random_unitary(rng).matrix;
        StateVector gk = ket;
        apply_two_qubit_gate(gk, g, a, b);
        cplx direct = bra.inner(gk);
        cplx via_env = g.cwiseProduct(pair_environment(bra, ket, a, b)).sum();
        EXPECT_LT(std::abs(direct - via_env), 1e-12);
    }
}

TEST(StateVector, one_qubit_gate_matches_tensor_with_identity) {
    Rng rng(9);
    StateVector s = random_state(4, rng);
    StateVector t = s;
    Mat2 u = haar_random_unitary_2(rng);
    apply_one_qubit_gate(s, u, 2);
    apply_two_qubit_gate(t, kron(u, Mat2::Identity()), 2, 3);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_LT(std::abs(s[i] - t[i]), 1e-13);
    }
}

TEST(StateVector, bitstring_convention_qubit0_is_msb) {
    EXPECT_EQ(bitstring_to_index("100"), 4u);
    EXPECT_EQ(bitstring_to_index("001"), 1u);
    EXPECT_EQ(index_to_bitstring(6, 4), "0110");
    EXPECT_THROW(bitstring_to_index("10a"), ParameterError);
}
