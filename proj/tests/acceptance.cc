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

// Acceptance suite: one PASS/FAIL line per criterion. Arguments restrict the run
// to the listed criterion numbers; criterion 11 uses whichever of 4-8 ran.
// Set PEAKCIRC_ACCEPTANCE_DIR to keep the experiment directories somewhere specific.
// The result lines are also written to acceptance_summary.txt in the working directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <thread>

#include "peakcirc/errors.h"
#include "peakcirc/experiment.h"
#include "peakcirc/oracle.h"
#include "peakcirc/seeding.h"

using namespace peakcirc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

fs::path g_root;
std::map<int, ResultRecord> g_ensembles;  // criterion -> record, read by criterion 11

template <typename... Args>
std::string fmt(const char *f, Args... args) {
    char buf[1024];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

ResultRecord run_manifest(int criterion, const std::string &body) {
    fs::path dir = g_root / ("criterion" + std::to_string(criterion));
    ExperimentManifest m = parse_manifest("{" + body + ", \"output\": \"" + dir.string() + "\"}");
    RunOptions opt;
    opt.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (fs::exists(dir / "RESUME")) {
        // Pick up an interrupted earlier run of the same manifest.
        opt.resume = true;
        try {
            return run_experiment(m, opt);
        } catch (const IntegrityError &) {
            opt.resume = false;
        }
    }
    return run_experiment(m, opt);
}

const PointAggregate &point_for(const ResultRecord &r, int n, int tau_p = 0) {
    for (const auto &p : r.aggregates.points) {
        if (p.point.n == n && p.point.tau_p == tau_p) {
            return p;
        }
    }
    throw std::runtime_error("missing aggregate point");
}

const ResultRecord &oracle_ensemble() {
    static const ResultRecord rec =
        run_manifest(1, R"("kind": "oracle-check", "n": [4, 6, 8], "instances": 2000, "seed": 101)");
    return rec;
}

Outcome check_single_layer_law() {
    const ResultRecord &rec = oracle_ensemble();
    Outcome o{true, ""};
    for (int n : {4, 6, 8}) {
        const auto &p = point_for(rec, n);
        double law = std::pow(25.0 / 48.0, n / 2.0);
        double mean = p.extra_mean[0], se = p.extra_stderr[0];
        o.pass = o.pass && std::abs(mean - law) <= 3 * se;
        o.detail += fmt("n=%d mean=%.4f target=%.4f 3se=%.4f; ", n, mean, law, 3 * se);
    }
    return o;
}

Outcome check_analytic_peaking_law() {
    const ResultRecord &rec = oracle_ensemble();
    Outcome o{true, ""};
    for (int n : {4, 6, 8}) {
        const auto &p = point_for(rec, n);
        double law = std::pow(7.0 / 8.0, n / 2.0);
        o.pass = o.pass && std::abs(p.mean_delta - law) <= 3 * p.stderr_delta;
        o.detail += fmt("n=%d mean=%.4f target=%.4f 3se=%.4f; ", n, p.mean_delta, law, 3 * p.stderr_delta);
    }
    return o;
}

Outcome check_gradient_fidelity() {
    Rng rng(3);
    std::uniform_int_distribution<int> depth_r(1, 8), depth_p(1, 4), coin(0, 1);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    const double h = 1e-5;
    double worst = 0.0;  // max of |adjoint - fd| / max(1e-5 |fd|, 1e-9); pass iff <= 1
    std::size_t coords = 0, bad = 0;
    for (int draw = 0; draw < 100; ++draw) {
        const int n = 4 + 2 * (draw % 3);
        auto base = sample_random_circuit(n, depth_r(rng), derive_seed(3, draw));
        const int tau_p = depth_p(rng);
        const PeakingParity parity = coin(rng) ? PeakingParity::Mirror : PeakingParity::Continue;
        std::size_t count =
            brickwall_layout(n, tau_p, base.peaking_first_parity(parity)).pair_count() * kKakParamCount;
        std::vector<double> theta(count);
        for (auto &t : theta) {
            t = angle(rng);
        }
        auto inst = attach_peaking_layers(base, tau_p, theta, parity);
        ObjectiveAndGradient og = objective_and_gradient(inst, theta);
        for (std::size_t k = 0; k < count; ++k) {
            auto plus = theta, minus = theta;
            plus[k] += h;
            minus[k] -= h;
            double fd = (run(inst, plus).probability(0) - run(inst, minus).probability(0)) / (2 * h);
            double ratio = std::abs(og.grad[k] - fd) / std::max(1e-5 * std::abs(fd), 1e-9);
            worst = std::max(worst, ratio);
            bad += ratio > 1.0;
            ++coords;
        }
    }
    return {bad == 0, fmt("100 draws, %zu coordinates, %zu outside tolerance, worst error/tolerance=%.3g", coords,
                          bad, worst)};
}

Outcome check_rarity() {
    ResultRecord rec = run_manifest(4, R"("kind": "rarity", "n": [10], "tau_r": 10, "instances": 10000, "seed": 104)");
    g_ensembles[4] = rec;
    const auto &p = point_for(rec, 10);
    return {p.max_max_peak < 0.04,
            fmt("%zu instances, max max-peak=%.5f (limit 0.04), mean=%.5f", p.count, p.max_max_peak, p.mean_max_peak)};
}

Outcome check_collision() {
    ResultRecord rec = run_manifest(5, R"("kind": "rarity", "n": [10], "tau_r": 20, "instances": 500, "seed": 105)");
    g_ensembles[5] = rec;
    const auto &p = point_for(rec, 10);
    return {p.gamma_hat >= 1.8 && p.gamma_hat <= 2.2, fmt("gamma_hat=%.4f (window [1.8, 2.2])", p.gamma_hat)};
}

Outcome check_headline() {
    ResultRecord rec = run_manifest(6, R"("kind": "peak-sweep", "n": [12], "tau_r": 40, "tau_p": 10,
        "instances": 20, "seed": 106, "optimizer": {"restarts": 10})");
    g_ensembles[6] = rec;
    const auto &p = point_for(rec, 12, 10);
    return {p.mean_delta >= 0.14 && p.mean_delta <= 0.28,
            fmt("mean best delta=%.4f +- %.4f over %zu instances (window [0.14, 0.28])", p.mean_delta, p.stderr_delta,
                p.count)};
}

Outcome check_sweep() {
    ResultRecord rec = run_manifest(7, R"("kind": "peak-sweep", "n": [10], "tau_r": 50, "tau_p": [4, 6, 8, 10, 12],
        "instances": 20, "seed": 107, "optimizer": {"restarts": 10})");
    g_ensembles[7] = rec;
    Outcome o{true, "means:"};
    double prev = -1.0;
    for (int tp : {4, 6, 8, 10, 12}) {
        double m = point_for(rec, 10, tp).mean_delta;
        o.pass = o.pass && m > prev;
        prev = m;
        o.detail += fmt(" tau_p=%d:%.4f", tp, m);
    }
    double d8 = point_for(rec, 10, 8).mean_delta;
    o.pass = o.pass && d8 > 0.12;
    o.detail += fmt("; strictly increasing and delta(8)=%.4f > 0.12", d8);
    return o;
}

Outcome check_scaling() {
    ResultRecord rec = run_manifest(8, R"("kind": "scaling-fit", "n": [6, 8, 10, 12], "tau_r": "n", "tau_p": "tau_r/2",
        "instances": 20, "seed": 108, "optimizer": {"restarts": 10}, "extrapolate_n": [50])");
    g_ensembles[8] = rec;
    if (!rec.aggregates.fit) {
        return {false, "no fit produced"};
    }
    std::string detail = "means:";
    for (const auto &p : rec.aggregates.points) {
        detail += fmt(" n=%d:%.4f", p.point.n, p.mean_delta);
    }
    double a = rec.aggregates.fit->a;
    detail += fmt("; fitted a=%.4f (window [1.10, 1.30]), c=%.4f", a, rec.aggregates.fit->c);
    return {a >= 1.10 && a <= 1.30, detail};
}

Outcome check_entropy() {
    ResultRecord rec = run_manifest(9, R"("kind": "entropy-profile", "n": [12], "tau_r": 50, "instances": 50, "seed": 109)");
    const auto &p = point_for(rec, 12);
    const auto &s = p.extra_mean;  // s[d-1] = mean entropy after depth d
    // Only odd layers cross the middle cut, so growth is checked on depths 1, 3, ..., n+1.
    bool grows = true;
    std::string detail = "S(d):";
    for (int d = 1; d + 2 <= 13; d += 2) {
        grows = grows && s[static_cast<std::size_t>(d + 1)] > s[static_cast<std::size_t>(d - 1)];
    }
    for (int d : {1, 3, 5, 7, 9, 11, 13, 25, 50}) {
        detail += fmt(" %d:%.3f", d, s[static_cast<std::size_t>(d - 1)]);
    }
    double page = page_entropy_bits(12);
    double gap = std::abs(s[49] - page);
    detail += fmt("; Page=%.4f, |S(50)-Page|=%.4f (limit 0.3), growing=%s", page, gap, grows ? "yes" : "no");
    return {grows && gap <= 0.3, detail};
}

Outcome check_oracle_equivalence() {
    OptimizerConfig cfg;
    double worst = 2.0;
    int below = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        std::uint64_t seed = derive_seed(110, i);
        auto inst = sample_random_circuit(4, 2, seed);
        double opt = optimize_peaking(inst, 1, cfg, seed).best_delta;
        double bf = brute_force_max_peak(inst, 1, cfg.parity).delta;
        worst = std::min(worst, opt / bf);
        below += opt < 0.95 * bf;
    }
    return {below == 0, fmt("20 instances, worst optimizer/brute-force ratio=%.6f (limit 0.95)", worst)};
}

Outcome check_markov_consistency() {
    if (g_ensembles.empty()) {
        return {false, "no ensembles from criteria 4-8 were run"};
    }
    Outcome o{true, ""};
    std::size_t checked = 0;
    for (const auto &[criterion, rec] : g_ensembles) {
        for (const auto &p : rec.aggregates.points) {
            for (const auto &r : p.rarity) {
                double slack = r.estimate.ci95.high - r.estimate.p_hat;
                bool ok = r.estimate.p_hat <= r.bound + slack;
                ++checked;
                if (!ok) {
                    o.pass = false;
                    o.detail += fmt("violated: criterion %d n=%d tau_p=%d delta=%.2f p_hat=%.4f bound=%.4f; ", criterion,
                                    p.point.n, p.point.tau_p, r.estimate.threshold, r.estimate.p_hat, r.bound);
                }
            }
        }
    }
    o.detail += fmt("%zu (ensemble, delta) pairs checked from %zu ensembles", checked, g_ensembles.size());
    return o;
}

}  // namespace

int main(int argc, char **argv) {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"single-layer peak law", check_single_layer_law},
        {"analytic peaking law", check_analytic_peaking_law},
        {"gradient fidelity", check_gradient_fidelity},
        {"rarity of peaks", check_rarity},
        {"collision probability", check_collision},
        {"headline peak optimization", check_headline},
        {"peak-sweep trend", check_sweep},
        {"scaling fit", check_scaling},
        {"entropy profile", check_entropy},
        {"oracle equivalence", check_oracle_equivalence},
        {"Markov-type rarity bound", check_markov_consistency},
    };
    std::set<int> selected;
    for (int k = 1; k < argc; ++k) {
        selected.insert(std::atoi(argv[k]));
    }
    const char *root = std::getenv("PEAKCIRC_ACCEPTANCE_DIR");
    g_root = root ? fs::path(root) : fs::temp_directory_path() / "peakcirc_acceptance";
    fs::create_directories(g_root);

    int failures = 0;
    std::FILE *summary = std::fopen("acceptance_summary.txt", "w");
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        int id = static_cast<int>(k + 1);
        if (!selected.empty() && !selected.count(id)) {
            continue;
        }
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::string line = fmt("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first,
                               o.detail.c_str(), secs);
        std::fputs(line.c_str(), stdout);
        std::fflush(stdout);
        if (summary) {
            std::fputs(line.c_str(), summary);
            std::fflush(summary);
        }
    }
    if (summary) {
        std::fclose(summary);
    }
    return failures == 0 ? 0 : 1;
}
