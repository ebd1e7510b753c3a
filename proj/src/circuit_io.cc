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

#include "peakcirc/circuit_io.h"

#include <fstream>
#include <sstream>

#include "peakcirc/errors.h"
#include "peakcirc/hexfloat.h"

namespace peakcirc {

namespace {

constexpr const char *kMagic = "peakcirc-circuit";
constexpr int kVersion = 1;

class Reader {
  public:
    Reader(std::istream &in, std::string source) : in_(in), source_(std::move(source)) {
    }

    std::string word(const std::string &field) {
        std::string w;
        if (!(in_ >> w)) {
            fail(field, "unexpected end of input");
        }
        return w;
    }

    void expect(const std::string &keyword) {
        std::string w = word(keyword);
        if (w != keyword) {
            fail(keyword, "expected keyword '" + keyword + "', found '" + w + "'");
        }
    }

    long long integer(const std::string &field) {
        std::string w = word(field);
        try {
            std::size_t used = 0;
            long long v = std::stoll(w, &used);
            if (used == w.size()) {
                return v;
            }
        } catch (const std::exception &) {
        }
        fail(field, "not an integer: '" + w + "'");
    }

    std::uint64_t unsigned_integer(const std::string &field) {
        std::string w = word(field);
        try {
            std::size_t used = 0;
            unsigned long long v = std::stoull(w, &used);
            if (used == w.size() && w.front() != '-') {
                return v;
            }
        } catch (const std::exception &) {
        }
        fail(field, "not an unsigned integer: '" + w + "'");
    }

    double real(const std::string &field) {
        std::string w = word(field);
        auto v = parse_hex(w);
        if (!v) {
            fail(field, "not a hex float: '" + w + "'");
        }
        return *v;
    }

    [[noreturn]] void fail(const std::string &field, const std::string &what) {
        throw IntegrityError(source_, field, what);
    }

  private:
    std::istream &in_;
    std::string source_;
};

}  // namespace

void write_circuit(std::ostream &out, const PeakedCircuitInstance &instance) {
    out << kMagic << ' ' << kVersion << '\n';
    out << "n " << instance.num_qubits() << '\n';
    out << "tau_r " << instance.tau_r() << '\n';
    out << "tau_p " << instance.tau_p() << '\n';
    out << "parity " << to_string(instance.parity()) << '\n';
    out << "seed " << instance.seed() << '\n';
    out << "fixed " << instance.fixed_gates().size() << '\n';
    for (const Mat4 &g : instance.fixed_gates()) {
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                out << format_hex(g(r, c).real()) << ' ' << format_hex(g(r, c).imag()) << (r == 3 && c == 3 ? '\n' : ' ');
            }
        }
    }
    out << "theta " << instance.params().size() << '\n';
    for (double t : instance.params()) {
        out << format_hex(t) << '\n';
    }
    out << "end\n";
}

PeakedCircuitInstance read_circuit(std::istream &in, const std::string &source) {
    Reader r(in, source);
    r.expect(kMagic);
    if (r.integer("version") != kVersion) {
        r.fail("version", "unsupported format version");
    }
    r.expect("n");
    auto n = static_cast<int>(r.integer("n"));
    r.expect("tau_r");
    auto tau_r = static_cast<int>(r.integer("tau_r"));
    r.expect("tau_p");
    auto tau_p = static_cast<int>(r.integer("tau_p"));
    r.expect("parity");
    std::string parity_text = r.word("parity");
    r.expect("seed");
    std::uint64_t seed = r.unsigned_integer("seed");

    CircuitLayout layout;
    PeakingParity parity;
    try {
        layout = brickwall_layout(n, tau_r);
        parity = parse_peaking_parity(parity_text);
    } catch (const std::exception &e) {
        r.fail("header", e.what());
    }

    r.expect("fixed");
    auto count = static_cast<std::size_t>(r.integer("fixed"));
    if (count != layout.pair_count()) {
        r.fail("fixed", "gate count " + std::to_string(count) + " does not match layout (" +
                            std::to_string(layout.pair_count()) + ")");
    }
    std::vector<Mat4> gates(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::string field = "fixed[" + std::to_string(k) + "]";
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double re = r.real(field);
                double im = r.real(field);
                gates[k](i, j) = cplx(re, im);
            }
        }
    }
    PeakedCircuitInstance base(std::move(layout), std::move(gates), seed);

    r.expect("theta");
    auto params = static_cast<std::size_t>(r.integer("theta"));
    std::vector<double> theta(params);
    for (std::size_t k = 0; k < params; ++k) {
        theta[k] = r.real("theta[" + std::to_string(k) + "]");
    }
    r.expect("end");
    try {
        return attach_peaking_layers(base, tau_p, std::move(theta), parity);
    } catch (const std::exception &e) {
        r.fail("theta", e.what());
    }
}

void save_circuit(const std::filesystem::path &path, const PeakedCircuitInstance &instance) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_circuit(out, instance);
}

PeakedCircuitInstance load_circuit(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IntegrityError(path.string(), "file", "cannot open");
    }
    return read_circuit(in, path.string());
}

}  // namespace peakcirc
