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
#include <span>
#include <vector>

#include "peakcirc/circuit.h"

namespace peakcirc {

struct OptimizerConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int max_iters = 2000;
    int restarts = 10;
    /// Stop a restart once the best objective improved by less than this fraction over `plateau_window` iterations.
    double plateau_tol = 1e-6;
    int plateau_window = 100;
    /// Standard deviation of the Gaussian initial angles (radians).
    double init_scale = 0.1;
    PeakingParity parity = PeakingParity::Continue;
    /// Threads used to run restarts side by side. Results do not depend on it.
    int restart_workers = 1;
    /// Keep the per-iteration objective of every restart.
    bool record_traces = false;

    bool operator==(const OptimizerConfig &) const = default;

    /// Throws ParameterError naming every invalid field.
    void validate() const;
};

struct RestartResult {
    double final_delta = 0.0;  // best objective seen in this restart
    int iterations = 0;
    bool converged = false;    // stopped on plateau rather than max_iters
    std::uint64_t seed = 0;
    std::vector<double> trace;  // objective per iteration, when recorded
};

struct OptimizationResult {
    std::vector<double> best_theta;
    double best_delta = 0.0;
    std::vector<RestartResult> per_restart;
    std::uint64_t instance_seed = 0;
    std::uint64_t optimizer_seed = 0;
};

/**
 * delta(theta) = |<0^n| C(theta) |0^n>|^2 and its exact gradient.
 *
 * The random part of the circuit is simulated once at construction. Each
 * evaluation runs the peaking layers forward, then walks them backward
 * with two states: the ket, uncomputed gate by gate, and the costate
 * C_{>g}^dagger |0^n>. At every gate the pair environment between them is
 * contracted with the 15 analytic KAK derivatives. Cost is O(P 2^n) for P
 * peaking gates; memory is three state vectors.
 */
class PeakingObjective {
  public:
    explicit PeakingObjective(const PeakedCircuitInstance &instance);

    const PeakedCircuitInstance &instance() const {
        return instance_;
    }
    std::size_t param_count() const {
        return instance_.param_count();
    }
    /// Output state of the fixed layers, C_r |0^n>.
    const StateVector &random_output() const {
        return random_output_;
    }

    double value(std::span<const double> theta) const;
    /// Writes d delta / d theta into `grad` and returns delta.
    double value_and_gradient(std::span<const double> theta, std::span<double> grad);

  private:
    PeakedCircuitInstance instance_;
    StateVector random_output_;
    StateVector ket_;
    StateVector costate_;
    std::vector<Mat4> gates_;
};

struct ObjectiveAndGradient {
    double delta = 0.0;
    std::vector<double> grad;
};

ObjectiveAndGradient objective_and_gradient(const PeakedCircuitInstance &instance, std::span<const double> theta);

struct AdamMoments {
    std::vector<double> first;
    std::vector<double> second;
    long long step = 0;

    explicit AdamMoments(std::size_t size = 0) : first(size, 0.0), second(size, 0.0) {
    }
};

/// One bias-corrected Adam update that ascends along `grad`.
void adam_step(std::span<double> theta, AdamMoments &moments, std::span<const double> grad,
               const OptimizerConfig &config);

/**
 * Best-of-restarts Adam maximization of delta over tau_p peaking layers.
 *
 * `instance` must have no peaking layers. Restart r starts from Gaussian
 * angles drawn from Rng(derive_seed(optimizer_seed, r)); the result is a pure
 * function of (instance, tau_p, config, optimizer_seed).
 */
OptimizationResult optimize_peaking(const PeakedCircuitInstance &instance, int tau_p, const OptimizerConfig &config,
                                    std::uint64_t optimizer_seed);

}  // namespace peakcirc
