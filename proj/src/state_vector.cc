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

#include <bit>
#include <string>

#include "peakcirc/errors.h"

namespace peakcirc {

namespace {

void check_qubit_count(int n) {
    if (n < 2 || n > kMaxQubits) {
        throw SizeError("qubit count " + std::to_string(n) + " outside [2, " + std::to_string(kMaxQubits) + "]");
    }
}

void check_pair(int n, int q_a, int q_b) {
    if (q_a < 0 || q_b < 0 || q_a >= n || q_b >= n) {
        throw IndexError("qubit pair (" + std::to_string(q_a) + ", " + std::to_string(q_b) + ") out of range for n=" +
                         std::to_string(n));
    }
    if (q_a == q_b) {
        throw IndexError("qubit pair uses qubit " + std::to_string(q_a) + " twice");
    }
}

inline std::size_t insert_zero_bit(std::size_t x, int pos) {
    std::size_t low = x & ((std::size_t{1} << pos) - 1);
    return ((x >> pos) << (pos + 1)) | low;
}

// Calls f(i0, i1, i2, i3) for every group of four indices addressed by the pair,
// ordered by the gate's 2-bit index 2*b_a + b_b.
template <typename F>
void for_each_pair_block(int n, int q_a, int q_b, F &&f) {
    const int pa = n - 1 - q_a;
    const int pb = n - 1 - q_b;
    const int lo = std::min(pa, pb);
    const int hi = std::max(pa, pb);
    const std::size_t ma = std::size_t{1} << pa;
    const std::size_t mb = std::size_t{1} << pb;
    const std::size_t inner = std::size_t{1} << lo;
    const std::size_t middle = std::size_t{1} << (hi - lo - 1);
    const std::size_t outer = std::size_t{1} << (n - 1 - hi);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t m = 0; m < middle; ++m) {
            const std::size_t prefix = (o << (hi + 1)) | (m << (lo + 1));
            for (std::size_t i = 0; i < inner; ++i) {
                const std::size_t base = prefix | i;
                f(base, base | mb, base | ma, base | ma | mb);
            }
        }
    }
}

}  // namespace

StateVector::StateVector(int n) : n_(n) {
    check_qubit_count(n);
    amps_.assign(std::size_t{1} << n, cplx{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(std::vector<cplx> amps) : n_(0), amps_(std::move(amps)) {
    if (amps_.size() < 4 || !std::has_single_bit(amps_.size())) {
        throw SizeError("amplitude count " + std::to_string(amps_.size()) + " is not a power of two >= 4");
    }
    n_ = std::countr_zero(amps_.size());
    check_qubit_count(n_);
}

double StateVector::norm_squared() const {
    double total = 0.0;
    for (const auto &a : amps_) {
        total += std::norm(a);
    }
    return total;
}

cplx StateVector::inner(const StateVector &other) const {
    if (other.size() != size()) {
        throw SizeError("inner product of states with different sizes");
    }
    cplx total{0.0, 0.0};
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        total += std::conj(amps_[i]) * other.amps_[i];
    }
    return total;
}

StateVector zero_state(int n) {
    return StateVector(n);
}

void apply_two_qubit_gate(StateVector &state, const Mat4 &gate, int q_a, int q_b) {
    check_pair(state.num_qubits(), q_a, q_b);
    cplx g[4][4];
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            g[r][c] = gate(r, c);
        }
    }
    cplx *a = state.amps().data();
    for_each_pair_block(state.num_qubits(), q_a, q_b, [&](std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) {
        cplx v0 = a[i0], v1 = a[i1], v2 = a[i2], v3 = a[i3];
        a[i0] = g[0][0] * v0 + g[0][1] * v1 + g[0][2] * v2 + g[0][3] * v3;
        a[i1] = g[1][0] * v0 + g[1][1] * v1 + g[1][2] * v2 + g[1][3] * v3;
        a[i2] = g[2][0] * v0 + g[2][1] * v1 + g[2][2] * v2 + g[2][3] * v3;
        a[i3] = g[3][0] * v0 + g[3][1] * v1 + g[3][2] * v2 + g[3][3] * v3;
    });
}

void apply_one_qubit_gate(StateVector &state, const Mat2 &gate, int q) {
    int n = state.num_qubits();
    if (q < 0 || q >= n) {
        throw IndexError("qubit " + std::to_string(q) + " out of range for n=" + std::to_string(n));
    }
    cplx g00 = gate(0, 0), g01 = gate(0, 1), g10 = gate(1, 0), g11 = gate(1, 1);
    std::size_t m = std::size_t{1} << (n - 1 - q);
    cplx *a = state.amps().data();
    for (std::size_t k = 0; k < (state.size() >> 1); ++k) {
        std::size_t i0 = insert_zero_bit(k, n - 1 - q);
        std::size_t i1 = i0 | m;
        cplx v0 = a[i0], v1 = a[i1];
        a[i0] = g00 * v0 + g01 * v1;
        a[i1] = g10 * v0 + g11 * v1;
    }
}

Mat4 pair_environment(const StateVector &bra, const StateVector &ket, int q_a, int q_b) {
    if (bra.size() != ket.size()) {
        throw SizeError("environment of states with different sizes");
    }
    check_pair(ket.num_qubits(), q_a, q_b);
    cplx e[4][4] = {};
    const cplx *l = bra.amps().data();
    const cplx *k = ket.amps().data();
    for_each_pair_block(ket.num_qubits(), q_a, q_b, [&](std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) {
        const std::size_t idx[4] = {i0, i1, i2, i3};
        for (int r = 0; r < 4; ++r) {
            cplx lr = std::conj(l[idx[r]]);
            for (int c = 0; c < 4; ++c) {
                e[r][c] += lr * k[idx[c]];
            }
        }
    });
    Mat4 out;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            out(r, c) = e[r][c];
        }
    }
    return out;
}

Mat4 reverse_step(StateVector &ket, StateVector &costate, const Mat4 &inverse, int q_a, int q_b) {
    if (ket.size() != costate.size()) {
        throw SizeError("reverse step on states with different sizes");
    }
    check_pair(ket.num_qubits(), q_a, q_b);
    cplx g[4][4];
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            g[r][c] = inverse(r, c);
        }
    }
    cplx e[4][4] = {};
    cplx *k = ket.amps().data();
    cplx *l = costate.amps().data();
    for_each_pair_block(ket.num_qubits(), q_a, q_b, [&](std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) {
        const std::size_t idx[4] = {i0, i1, i2, i3};
        cplx v[4], w[4], nv[4];
        for (int r = 0; r < 4; ++r) {
            v[r] = k[idx[r]];
            w[r] = l[idx[r]];
        }
        for (int r = 0; r < 4; ++r) {
            nv[r] = g[r][0] * v[0] + g[r][1] * v[1] + g[r][2] * v[2] + g[r][3] * v[3];
            k[idx[r]] = nv[r];
            l[idx[r]] = g[r][0] * w[0] + g[r][1] * w[1] + g[r][2] * w[2] + g[r][3] * w[3];
        }
        for (int r = 0; r < 4; ++r) {
            cplx wr = std::conj(w[r]);
            for (int c = 0; c < 4; ++c) {
                e[r][c] += wr * nv[c];
            }
        }
    });
    Mat4 out;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            out(r, c) = e[r][c];
        }
    }
    return out;
}

std::uint64_t bitstring_to_index(std::string_view bits) {
    std::uint64_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw ParameterError("bitstring contains '" + std::string(1, c) + "'");
        }
        index = (index << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return index;
}

std::string index_to_bitstring(std::uint64_t index, int n) {
    std::string bits(static_cast<std::size_t>(n), '0');
    for (int q = 0; q < n; ++q) {
        if ((index >> (n - 1 - q)) & 1) {
            bits[static_cast<std::size_t>(q)] = '1';
        }
    }
    return bits;
}

}  // namespace peakcirc
