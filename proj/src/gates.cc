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

#include <cmath>
#include <numbers>

#include "peakcirc/errors.h"

namespace peakcirc {

namespace {

const cplx kI{0.0, 1.0};

Mat2 rz(double t) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = std::exp(-kI * (t / 2));
    m(1, 1) = std::exp(kI * (t / 2));
    return m;
}

Mat2 ry(double t) {
    double c = std::cos(t / 2), s = std::sin(t / 2);
    Mat2 m;
    m << c, -s, s, c;
    return m;
}

// Magic (Bell) basis as columns: |Phi+>, i|Phi->, i|Psi+>, |Psi->.
const Mat4 &magic_basis() {
    static const Mat4 m = [] {
        Mat4 b;
        const double r = 1.0 / std::numbers::sqrt2;
        b << r, kI * r, 0, 0,  //
            0, 0, kI * r, r,   //
            0, 0, kI * r, -r,  //
            r, -kI * r, 0, 0;
        return b;
    }();
    return m;
}

Mat4 interaction_core(double x, double y, double z) {
    const Mat4 id = Mat4::Identity();
    Mat4 xx = kron(pauli::X(), pauli::X());
    Mat4 yy = kron(pauli::Y(), pauli::Y());
    Mat4 zz = kron(pauli::Z(), pauli::Z());
    return (std::cos(x) * id - kI * std::sin(x) * xx) * (std::cos(y) * id - kI * std::sin(y) * yy) *
           (std::cos(z) * id - kI * std::sin(z) * zz);
}

struct EulerFactors {
    Mat2 first, middle, last;  // Rz(a), Ry(b), Rz(c)
};

EulerFactors euler_factors(const double *e) {
    return {rz(e[0]), ry(e[1]), rz(e[2])};
}

// Splits an SU(2) x SU(2) element into its two factors.
std::pair<Mat2, Mat2> split_tensor_product(const Mat4 &l) {
    int bi = 0, bj = 0;
    double best = -1.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            double w = l.block<2, 2>(2 * i, 2 * j).squaredNorm();
            if (w > best) {
                best = w;
                bi = i;
                bj = j;
            }
        }
    }
    Mat2 block = l.block<2, 2>(2 * bi, 2 * bj);
    Mat2 second = block / std::sqrt(block.determinant());
    Mat2 first;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            first(i, j) = (second.adjoint() * l.block<2, 2>(2 * i, 2 * j)).trace() / 2.0;
        }
    }
    return {first, second};
}

// Z-Y-Z angles of a 2x2 unitary, ignoring its global phase.
std::array<double, 3> zyz_angles(const Mat2 &u) {
    Mat2 v = u / std::sqrt(u.determinant());
    double beta = 2.0 * std::atan2(std::abs(v(1, 0)), std::abs(v(0, 0)));
    double arg11 = std::abs(v(1, 1)) > 1e-300 ? std::arg(v(1, 1)) : 0.0;
    double arg10 = std::abs(v(1, 0)) > 1e-300 ? std::arg(v(1, 0)) : 0.0;
    return {arg11 + arg10, beta, arg11 - arg10};
}

}  // namespace

namespace pauli {
Mat2 I() {
    return Mat2::Identity();
}
Mat2 X() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}
Mat2 Y() {
    Mat2 m;
    m << 0, -kI, kI, 0;
    return m;
}
Mat2 Z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}
}  // namespace pauli

Mat4 kron(const Mat2 &a, const Mat2 &b) {
    Mat4 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return out;
}

Mat2 euler_zyz(double a, double b, double c) {
    return rz(a) * ry(b) * rz(c);
}

double unitarity_error(const Mat4 &u) {
    return (u.adjoint() * u - Mat4::Identity()).cwiseAbs().maxCoeff();
}

TwoQubitGate haar_random_unitary(Rng &rng) {
    std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2);
    Mat4 z;
    for (int c = 0; c < 4; ++c) {
        for (int r = 0; r < 4; ++r) {
            double re = normal(rng);
            double im = normal(rng);
            z(r, c) = cplx(re, im);
        }
    }
    Eigen::HouseholderQR<Mat4> qr(z);
    Mat4 q = qr.householderQ();
    const Mat4 &r = qr.matrixQR();
    for (int k = 0; k < 4; ++k) {
        cplx d = r(k, k);
        q.col(k) *= d / std::abs(d);
    }
    return {q, GateKind::Fixed};
}

Mat2 haar_random_unitary_2(Rng &rng) {
    std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2);
    Mat2 z;
    for (int c = 0; c < 2; ++c) {
        for (int r = 0; r < 2; ++r) {
            double re = normal(rng);
            double im = normal(rng);
            z(r, c) = cplx(re, im);
        }
    }
    Eigen::HouseholderQR<Mat2> qr(z);
    Mat2 q = qr.householderQ();
    const Mat2 &r = qr.matrixQR();
    for (int k = 0; k < 2; ++k) {
        cplx d = r(k, k);
        q.col(k) *= d / std::abs(d);
    }
    return q;
}

TwoQubitGate kak_gate(KakSpan p) {
    const double *e = p.data();
    Mat4 a = kron(euler_zyz(e[KakParams::kA1], e[KakParams::kA1 + 1], e[KakParams::kA1 + 2]),
                  euler_zyz(e[KakParams::kA2], e[KakParams::kA2 + 1], e[KakParams::kA2 + 2]));
    Mat4 b = kron(euler_zyz(e[KakParams::kB1], e[KakParams::kB1 + 1], e[KakParams::kB1 + 2]),
                  euler_zyz(e[KakParams::kB2], e[KakParams::kB2 + 1], e[KakParams::kB2 + 2]));
    Mat4 core = interaction_core(e[KakParams::kX], e[KakParams::kY], e[KakParams::kZ]);
    return {a * core * b, GateKind::Parameterized};
}

std::array<Mat4, kKakParamCount> kak_gate_derivatives(KakSpan p) {
    const double *e = p.data();
    const Mat2 half_z = -kI * 0.5 * pauli::Z();
    const Mat2 half_y = -kI * 0.5 * pauli::Y();

    // Single-qubit frames and their three angle derivatives.
    auto frame_with_derivs = [&](std::size_t offset) {
        EulerFactors f = euler_factors(e + offset);
        Mat2 full = f.first * f.middle * f.last;
        std::array<Mat2, 3> d = {half_z * full, f.first * half_y * f.middle * f.last, full * half_z};
        return std::pair{full, d};
    };
    auto [a1, da1] = frame_with_derivs(KakParams::kA1);
    auto [a2, da2] = frame_with_derivs(KakParams::kA2);
    auto [b1, db1] = frame_with_derivs(KakParams::kB1);
    auto [b2, db2] = frame_with_derivs(KakParams::kB2);

    Mat4 a = kron(a1, a2);
    Mat4 b = kron(b1, b2);
    Mat4 core = interaction_core(e[KakParams::kX], e[KakParams::kY], e[KakParams::kZ]);
    Mat4 core_b = core * b;
    Mat4 a_core = a * core;

    std::array<Mat4, kKakParamCount> out;
    for (int k = 0; k < 3; ++k) {
        out[KakParams::kA1 + k] = kron(da1[k], a2) * core_b;
        out[KakParams::kA2 + k] = kron(a1, da2[k]) * core_b;
        out[KakParams::kB1 + k] = a_core * kron(db1[k], b2);
        out[KakParams::kB2 + k] = a_core * kron(b1, db2[k]);
    }
    out[KakParams::kX] = a * (-kI * kron(pauli::X(), pauli::X())) * core_b;
    out[KakParams::kY] = a * (-kI * kron(pauli::Y(), pauli::Y())) * core_b;
    out[KakParams::kZ] = a * (-kI * kron(pauli::Z(), pauli::Z())) * core_b;
    return out;
}

TwoQubitGate dagger(const TwoQubitGate &gate) {
    return {gate.matrix.adjoint(), gate.kind};
}

double phase_insensitive_distance(const Mat4 &u, const Mat4 &v) {
    cplx overlap = (v.adjoint() * u).trace();
    cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx{1.0, 0.0};
    return (u - phase * v).cwiseAbs().maxCoeff();
}

KakParams kak_decompose(const Mat4 &u) {
    const Mat4 &m = magic_basis();
    Mat4 us = u / std::pow(u.determinant(), 0.25);
    Mat4 up = m.adjoint() * us * m;
    Mat4 sym = up.transpose() * up;

    // sym is complex symmetric and unitary, so its real and imaginary parts are
    // commuting real symmetric matrices with a shared orthogonal eigenbasis.
    Eigen::Matrix4d p;
    bool found = false;
    for (double mix : {0.6180339887, 1.7320508076, 0.2763932023, 3.1415926536, 0.0}) {
        Eigen::Matrix4d h = sym.real() + mix * sym.imag();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(h);
        p = solver.eigenvectors();
        Mat4 diag = p.transpose().cast<cplx>() * sym * p.cast<cplx>();
        Mat4 off = diag;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() < 1e-10) {
            found = true;
            break;
        }
    }
    if (!found) {
        throw StructuralError("kak_decompose: could not diagonalize U^T U in the magic basis");
    }
    if (p.determinant() < 0) {
        p.col(0) *= -1.0;
    }
    Mat4 pc = p.cast<cplx>();
    Eigen::Vector4cd d = (pc.transpose() * sym * pc).diagonal();
    Eigen::Vector4d phases;
    for (int k = 0; k < 4; ++k) {
        phases(k) = std::arg(d(k)) / 2.0;
    }
    auto left_factor = [&] {
        Eigen::Vector4cd inv_d;
        for (int k = 0; k < 4; ++k) {
            inv_d(k) = std::exp(-kI * phases(k));
        }
        return Mat4(up * pc * inv_d.asDiagonal());
    };
    Mat4 k1 = left_factor();
    if (k1.determinant().real() < 0) {
        phases(0) += std::numbers::pi;
        k1 = left_factor();
    }

    Mat4 local_a = m * k1.real().cast<cplx>() * m.adjoint();
    Mat4 local_b = m * pc.transpose() * m.adjoint();

    // Diagonal of -i(x XX + y YY + z ZZ) + i g in the magic basis is linear in (x, y, z, g).
    Mat4 sx = m.adjoint() * kron(pauli::X(), pauli::X()) * m;
    Mat4 sy = m.adjoint() * kron(pauli::Y(), pauli::Y()) * m;
    Mat4 sz = m.adjoint() * kron(pauli::Z(), pauli::Z()) * m;
    Eigen::Matrix4d system;
    for (int k = 0; k < 4; ++k) {
        system(k, 0) = -sx(k, k).real();
        system(k, 1) = -sy(k, k).real();
        system(k, 2) = -sz(k, k).real();
        system(k, 3) = 1.0;
    }
    Eigen::Vector4d xyzg = system.fullPivLu().solve(phases);

    auto [a1, a2] = split_tensor_product(local_a);
    auto [b1, b2] = split_tensor_product(local_b);
    KakParams out;
    auto put = [&](std::size_t offset, const Mat2 &f) {
        auto angles = zyz_angles(f);
        for (std::size_t k = 0; k < 3; ++k) {
            out.angles[offset + k] = angles[k];
        }
    };
    put(KakParams::kA1, a1);
    put(KakParams::kA2, a2);
    put(KakParams::kB1, b1);
    put(KakParams::kB2, b2);
    out.angles[KakParams::kX] = xyzg(0);
    out.angles[KakParams::kY] = xyzg(1);
    out.angles[KakParams::kZ] = xyzg(2);

    double err = phase_insensitive_distance(kak_gate(out).matrix, u);
    if (!(err < 1e-8)) {
        throw StructuralError("kak_decompose: reconstruction error " + std::to_string(err));
    }
    return out;
}

}  // namespace peakcirc
