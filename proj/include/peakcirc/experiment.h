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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "peakcirc/optimizer.h"
#include "peakcirc/stats.h"

namespace peakcirc {

inline constexpr const char *kSoftwareVersion = "peakcirc 0.1.0";

enum class ExperimentKind { Rarity, PeakSweep, EntropyProfile, ScalingFit, OracleCheck };

const char *to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view text);

/// Random depth as a function of n: a fixed value, n, or n/2.
struct DepthRule {
    enum class Kind { Fixed, N, HalfN };
    Kind kind = Kind::Fixed;
    int value = 0;

    int resolve(int n) const;
    bool operator==(const DepthRule &) const = default;
};

/// Peaking depth: explicit values, or tau_r / divisor rounded down with a minimum of 1.
struct PeakingRule {
    std::vector<int> values;  // used when divisor == 0
    int divisor = 0;

    std::vector<int> resolve(int tau_r) const;
    bool operator==(const PeakingRule &) const = default;
};

struct ExperimentManifest {
    ExperimentKind kind = ExperimentKind::Rarity;
    std::vector<int> n;
    DepthRule tau_r;
    PeakingRule tau_p;
    int instances = 20;
    OptimizerConfig optimizer;
    std::uint64_t seed = 1;
    std::string output;
    /// Peak weights at which rarity and the Markov-type ceiling are evaluated.
    std::vector<double> thresholds = {0.01, 0.04, 0.1};
    /// scaling-fit only: n values at which the fitted curve is reported as an extrapolation.
    std::vector<int> extrapolate_n;

    /// Throws ValidationError listing every offending field.
    void validate() const;
    /// Canonical JSON text; the manifest hash is computed over it.
    std::string to_json() const;
    /// SHA-256 (hex) of to_json().
    std::string hash() const;

    bool operator==(const ExperimentManifest &) const = default;
};

/**
 * Manifest JSON schema:
 *
 *   { "kind": "rarity" | "peak-sweep" | "entropy-profile" | "scaling-fit" | "oracle-check",
 *     "n": [int, ...],
 *     "tau_r": int | "n" | "n/2",
 *     "tau_p": int | [int, ...] | "tau_r/2" | "tau_r/3" | "tau_r/4",   (optimizing kinds only)
 *     "instances": int, "seed": uint64, "output": "dir",
 *     "optimizer": { "learning_rate", "beta1", "beta2", "eps", "max_iters", "restarts",
 *                    "plateau_tol", "plateau_window", "init_scale",
 *                    "peaking_parity": "continue" | "mirror" },   (all optional)
 *     "thresholds": [double, ...], "extrapolate_n": [int, ...] }     (optional)
 *
 * Throws ValidationError on malformed JSON, unknown keys or invalid values.
 */
ExperimentManifest parse_manifest(std::string_view json_text);
ExperimentManifest load_manifest(const std::filesystem::path &path);

struct ExperimentPoint {
    int n = 0;
    int tau_r = 0;
    int tau_p = 0;
    bool operator==(const ExperimentPoint &) const = default;
};

/// Every (n, tau_r, tau_p) combination the manifest asks for, n-major.
std::vector<ExperimentPoint> experiment_points(const ExperimentManifest &manifest);

struct ResultRow {
    std::size_t point = 0;
    std::size_t instance = 0;
    std::uint64_t seed = 0;
    /// Optimized delta_{0^n} for optimizing kinds, the max-peak for rarity/entropy,
    /// and the analytic peaking-layer weight for oracle-check.
    double delta = 0.0;
    double max_peak = 0.0;
    double pi = 0.0;
    long long iterations = 0;
    double wall_seconds = 0.0;
    /// Kind-specific columns: entropy per depth, or the oracle-check quantities.
    std::vector<double> extra;

    /// Equal apart from wall time.
    bool same_outcome(const ResultRow &other) const;
    bool operator==(const ResultRow &) const = default;
};

struct RarityCheck {
    RarityEstimate estimate;
    double bound = 0.0;  // gamma_hat / (threshold^2 2^n)
    bool consistent = false;  // p_hat <= bound + CI half-width

    bool operator==(const RarityCheck &) const = default;
};

struct PointAggregate {
    ExperimentPoint point;
    std::size_t count = 0;
    double mean_delta = 0.0;
    double var_delta = 0.0;
    double stderr_delta = 0.0;
    double max_delta = 0.0;
    double mean_max_peak = 0.0;
    double max_max_peak = 0.0;
    double mean_pi = 0.0;
    double gamma_hat = 0.0;
    std::vector<RarityCheck> rarity;
    std::vector<double> extra_mean;
    std::vector<double> extra_stderr;

    bool operator==(const PointAggregate &) const = default;
};

struct NamedCheck {
    std::string name;
    bool passed = false;
    std::string detail;
    bool operator==(const NamedCheck &) const = default;
};

struct Aggregates {
    std::vector<PointAggregate> points;
    std::optional<DecayFit> fit;
    /// (n, fitted delta) pairs. These are extrapolations, not measurements.
    std::vector<std::pair<int, double>> extrapolation;
    std::vector<NamedCheck> checks;

    bool all_checks_passed() const;
    bool operator==(const Aggregates &) const = default;
};

struct ResultRecord {
    ExperimentManifest manifest;
    std::string manifest_hash;
    std::vector<ResultRow> rows;  // sorted by (point, instance)
    Aggregates aggregates;
    std::string software_version = kSoftwareVersion;
    std::string timestamp;
    bool complete = false;

    bool operator==(const ResultRecord &) const = default;
};

/// Computes one row; a pure function of (manifest, point index, instance index).
ResultRow compute_row(const ExperimentManifest &manifest, std::size_t point, std::size_t instance);

/// Aggregates from rows sorted by (point, instance).
Aggregates aggregate_rows(const ExperimentManifest &manifest, const std::vector<ResultRow> &rows);

struct RunOptions {
    int workers = 1;
    /// Stop after this many newly computed rows, leaving a resumable partial run.
    std::optional<std::size_t> max_new_rows;
    /// Continue an interrupted run in manifest.output instead of starting over.
    bool resume = false;
};

/**
 * Runs the manifest's pipeline into manifest.output.
 *
 * Rows are appended to rows.tsv as instances finish, so a killed run loses
 * at most the rows in flight. With `resume`, rows already on disk are kept
 * and only the missing (point, instance) pairs are computed. When the run
 * stops early the record comes back with complete = false and a RESUME
 * marker stays in the directory; otherwise record.json and plot files are
 * written and the marker removed.
 */
ResultRecord run_experiment(ExperimentManifest manifest, const RunOptions &options = {});

/// Writes manifest.json, rows.tsv and record.json into dir.
void persist(const ResultRecord &record, const std::filesystem::path &dir);
/// Reads a persisted record. Throws IntegrityError naming the file and field on any inconsistency.
ResultRecord load(const std::filesystem::path &dir);

/// Writes the (x, y, error) plot-data files for the record's kind into dir.
void write_plot_data(const ResultRecord &record, const std::filesystem::path &dir);

}  // namespace peakcirc
