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

#include "peakcirc/gates.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace peakcirc;

namespace {

KakParams random_params(Rng &rng, double scale = 3.0) {
    std::uniform_real_distribution<double> angle(-scale, scale);
    KakParams p;
    for (auto &t : p.angles) {
        t = angle(rng);
    }
    return p;
}

}  // namespace

TEST(HaarRandomUnitary, unitary_and_deterministic) {
    Rng rng(1);
    for (int k = 0; k < 100; ++k) {
        EXPECT_LT(unitarity_error(haar_random_unitary(rng).matrix), 1e-10);
    }
    Rng a(42), b(42);
    EXPECT_EQ(haar_random_unitary(a).matrix, haar_random_unitary(b).matrix);
}

TEST(HaarRandomUnitary, porter_thomas_moments) {
    // For Haar U(d): E|U_00|^2 = 1/d, E|U_00|^4 = 2/(d(d+1)). d = 4 gives 1/4 and 1/10.
    Rng rng(2024);
    const int samples = 100000;
    double s1 = 0, s1sq = 0, s2 = 0, s2sq = 0;
    for (int k = 0; k < samples; ++k) {
        double w = std::norm(haar_random_unitary(rng).matrix(0, 0));
        s1 += w;
        s1sq += w * w;
        s2 += w * w;
        s2sq += w * w * w * w;
    }
    double m1 = s1 / samples, m2 = s2 / samples;
    double se1 = std::sqrt((s1sq / samples - m1 * m1) / samples);
    double se2 = std::sqrt((s2sq / samples - m2 * m2) / samples);
    EXPECT_LT(std::abs(m1 - 0.25), 3 * se1);
    EXPECT_LT(std::abs(m2 - 0.1), 3 * se2);
}

TEST(HaarRandomUnitary, phase_fix_matters_for_diagonal_phase) {
    // Without the R-diagonal phase correction, arg(U_00) is biased; Haar makes it uniform so E[U_00] = 0.
    Rng rng(77);
    cplx mean{0, 0};
    const int samples = 20000;
    for (int k = 0; k < samples; ++k) {
        mean += haar_random_unitary(rng).matrix(0, 0);
    }
    mean /= samples;
    EXPECT_LT(std::abs(mean), 0.02);
}

TEST(KakGate, zero_angles_give_identity) {
    KakParams p;
    EXPECT_LT((kak_gate(p).matrix - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(kak_gate(p).kind, GateKind::Parameterized);
}

TEST(KakGate, quarter_pi_xx_is_maximally_entangling) {
    KakParams p;
    p.angles[KakParams::kX] = std::numbers::pi / 4;
    Mat4 u = kak_gate(p).matrix;
    // exp(-i pi/4 XX)|00> = (|00> - i|11>)/sqrt(2).
    const double r = 1.0 / std::numbers::sqrt2;
    EXPECT_LT(std::abs(u(0, 0) - cplx(r, 0)), 1e-15);
    EXPECT_LT(std::abs(u(3, 0) - cplx(0, -r)), 1e-15);
    EXPECT_LT(std::abs(u(1, 0)), 1e-15);
    EXPECT_LT(std::abs(u(2, 0)), 1e-15);
    // Reshaped 2x2 amplitude matrix has both singular values 1/sqrt(2).
    Mat2 m;
    m << u(0, 0), u(1, 0), u(2, 0), u(3, 0);
    Eigen::JacobiSVD<Mat2> svd(m);
    EXPECT_NEAR(svd.singularValues()(0), r, 1e-14);
    EXPECT_NEAR(svd.singularValues()(1), r, 1e-14);
}

TEST(KakGate, unitary_for_random_angles) {
    Rng rng(5);
    for (int k = 0; k < 200; ++k) {
        EXPECT_LT(unitarity_error(kak_gate(random_params(rng, 20.0)).matrix), 1e-10);
    }
}

TEST(KakGate, derivatives_match_central_differences) {
    Rng rng(8);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        KakParams p = random_params(rng);
        auto d = kak_gate_derivatives(p);
        for (std::size_t k = 0; k < kKakParamCount; ++k) {
            KakParams plus = p, minus = p;
            plus.angles[k] += h;
            minus.angles[k] -= h;
            Mat4 fd = (kak_gate(plus).matrix - kak_gate(minus).matrix) / (2 * h);
            EXPECT_LT((fd - d[k]).cwiseAbs().maxCoeff(), 1e-7) << "param " << k;
        }
    }
}

TEST(KakGate, derivative_at_origin) {
    auto d = kak_gate_derivatives(KakParams{});
    const cplx i{0, 1};
    EXPECT_LT((d[KakParams::kX] + i * kron(pauli::X(), pauli::X())).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((d[KakParams::kZ] + i * kron(pauli::Z(), pauli::Z())).cwiseAbs().maxCoeff(), 1e-15);
    // A pure Z rotation's derivative stays diagonal: no entries off its support.
    Mat4 dz = d[KakParams::kA1];
    Mat4 off = dz;
    off.diagonal().setZero();
    EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT((dz + i * 0.5 * kron(pauli::Z(), pauli::I())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Dagger, involution_and_inverse) {
    Rng rng(13);
    TwoQubitGate u = haar_random_unitary(rng);
    EXPECT_EQ(dagger(dagger(u)).matrix, u.matrix);
    EXPECT_EQ(dagger(TwoQubitGate{}).matrix, Mat4::Identity());
    EXPECT_LT((u.matrix * dagger(u).matrix - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(KakDecompose, round_trips_haar_gates) {
    Rng rng(99);
    for (int k = 0; k < 300; ++k) {
        Mat4 u = haar_random_unitary(rng).matrix;
        KakParams p = kak_decompose(u);
        EXPECT_LT(phase_insensitive_distance(kak_gate(p).matrix, u), 1e-9);
    }
}

TEST(KakDecompose, handles_degenerate_gates) {
    Rng rng(4);
    std::vector<Mat4> cases = {Mat4::Identity(), kron(pauli::X(), pauli::Z()),
                               kron(haar_random_unitary_2(rng), haar_random_unitary_2(rng))};
    KakParams core;
    core.angles[KakParams::kX] = std::numbers::pi / 4;
    core.angles[KakParams::kY] = std::numbers::pi / 4;
    cases.push_back(kak_gate(core).matrix);
    Mat4 swap = Mat4::Zero();
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
    cases.push_back(swap);
    Mat4 cnot = Mat4::Zero();
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    cases.push_back(cnot);
    for (const Mat4 &u : cases) {
        KakParams p = kak_decompose(u);
        EXPECT_LT(phase_insensitive_distance(kak_gate(p).matrix, u), 1e-9);
    }
}
