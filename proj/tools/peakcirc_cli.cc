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

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "peakcirc/errors.h"
#include "peakcirc/experiment.h"

using namespace peakcirc;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kIntegrity = 2, kPartial = 3, kChecksFailed = 4 };

struct Options {
    std::string manifest;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    int workers = 1;
    std::optional<std::size_t> max_new_rows;
};

void print_summary(const ResultRecord &record) {
    std::printf("%-6s %-6s %-6s %-6s %-12s %-12s %-12s %-10s\n", "n", "tau_r", "tau_p", "count", "mean_delta",
                "stderr", "max_delta", "gamma_hat");
    for (const auto &p : record.aggregates.points) {
        std::printf("%-6d %-6d %-6d %-6zu %-12.6g %-12.3g %-12.6g %-10.4g\n", p.point.n, p.point.tau_r, p.point.tau_p,
                    p.count, p.mean_delta, p.stderr_delta, p.max_delta, p.gamma_hat);
    }
    if (const auto &fit = record.aggregates.fit) {
        std::printf("fit: delta = %.6g * %.6g^-n\n", fit->c, fit->a);
    }
    for (const auto &[n, v] : record.aggregates.extrapolation) {
        std::printf("EXTRAPOLATION n=%d delta=%.6g\n", n, v);
    }
    for (const auto &c : record.aggregates.checks) {
        std::printf("%s %s (%s)\n", c.passed ? "ok  " : "FAIL", c.name.c_str(), c.detail.c_str());
    }
}

int run(const Options &opt, std::optional<ExperimentKind> expected, bool resume) {
    try {
        ExperimentManifest manifest = load_manifest(opt.manifest);
        if (expected && manifest.kind != *expected) {
            throw ValidationError(std::string("invalid manifest\n  kind: manifest is ") + to_string(manifest.kind) +
                                  ", subcommand is " + to_string(*expected));
        }
        if (opt.seed) {
            manifest.seed = *opt.seed;
        }
        if (opt.out) {
            manifest.output = *opt.out;
        }
        RunOptions run_options;
        run_options.workers = opt.workers;
        run_options.max_new_rows = opt.max_new_rows;
        run_options.resume = resume;
        ResultRecord record = run_experiment(manifest, run_options);
        if (!record.complete) {
            std::fprintf(stderr, "partial: %zu rows stored in %s; rerun with `resume` to continue\n",
                         record.rows.size(), manifest.output.c_str());
            return kPartial;
        }
        print_summary(record);
        std::printf("wrote %s\n", manifest.output.c_str());
        return record.aggregates.all_checks_passed() ? kOk : kChecksFailed;
    } catch (const ValidationError &e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kValidation;
    } catch (const IntegrityError &e) {
        std::fprintf(stderr, "integrity error: %s\n", e.what());
        return kIntegrity;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Peaked random circuit experiments"};
    app.set_version_flag("--version", kSoftwareVersion);
    app.require_subcommand(1);

    Options opt;
    const std::pair<const char *, std::optional<ExperimentKind>> commands[] = {
        {"rarity", ExperimentKind::Rarity},
        {"peak-sweep", ExperimentKind::PeakSweep},
        {"entropy-profile", ExperimentKind::EntropyProfile},
        {"scaling-fit", ExperimentKind::ScalingFit},
        {"oracle-check", ExperimentKind::OracleCheck},
        {"resume", std::nullopt},
    };
    std::optional<ExperimentKind> chosen;
    bool resume = false;
    for (const auto &[name, kind] : commands) {
        CLI::App *sub = app.add_subcommand(name, kind ? std::string("run a ") + name + " experiment"
                                                      : std::string("continue an interrupted run"));
        sub->add_option("manifest", opt.manifest, "manifest JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "override the master seed");
        sub->add_option("--out", opt.out, "override the output directory");
        sub->add_option("--workers", opt.workers, "instances computed in parallel")->check(CLI::PositiveNumber);
        sub->add_option("--max-new-rows", opt.max_new_rows, "stop after this many new rows (result is partial)");
        sub->callback([&, kind = kind] {
            chosen = kind;
            resume = !kind;
        });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }
    return run(opt, chosen, resume);
}
