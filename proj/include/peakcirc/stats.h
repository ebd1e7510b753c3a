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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "peakcirc/state_vector.h"

namespace peakcirc {

/// p_C[s] = |<s|C|0^n>|^2 in basis-index order.
struct OutputDistribution {
    std::vector<double> probs;
};

OutputDistribution output_distribution(const StateVector &state);

/// Output probabilities sorted in descending order.
std::vector<double> sorted_distribution(const StateVector &state);

/// pi_C = sum_s p_C[s]^2, in [2^-n, 1].
double collision_probability(const StateVector &state);

/**
 * Von Neumann entropy, in bits, of the left n/2 qubits (qubits 0 .. n/2-1).
 * Schmidt spectrum from the SVD of the 2^{n/2} x 2^{n/2} amplitude matrix.
 * Throws SizeError for odd n.
 */
double entanglement_entropy_halfchain(const StateVector &state);

/// Page's mean entanglement entropy (bits) of a Haar state on an n/2 | n/2 split.
double page_entropy_bits(int n);

struct MeanAndError {
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance, 0 for fewer than two values
    double std_error = 0.0;
};

MeanAndError mean_and_error(std::span<const double> values);

struct InstanceSample {
    double delta = 0.0;      // peak weight reported for the instance
    double max_peak = 0.0;   // max_s p_C[s]
    double pi = 0.0;         // collision probability
    std::vector<double> entropy_profile;
};

struct DecayFit {
    double c = 0.0;
    double a = 0.0;
    /// log(delta_i) - log(c a^{-n_i}) per input point.
    std::vector<double> residuals;
    bool operator==(const DecayFit &) const = default;
};

struct EnsembleStats {
    int n = 0;
    std::vector<InstanceSample> samples;
    double mean_delta = 0.0;
    double var_delta = 0.0;
    double stderr_delta = 0.0;
    double max_delta = 0.0;
    double mean_pi = 0.0;
    /// 2^n * mean_pi, the empirical well-spread constant.
    double gamma_hat = 0.0;
    std::optional<DecayFit> fit;
};

/// Aggregates per-instance samples of an n-qubit ensemble. Requires at least one sample.
EnsembleStats summarize_ensemble(int n, std::vector<InstanceSample> samples);

struct ProportionInterval {
    double low = 0.0;
    double high = 0.0;
    bool operator==(const ProportionInterval &) const = default;
};

/// Wilson score interval for hits/total at normal quantile z (1.96 for 95%).
ProportionInterval wilson_interval(std::size_t hits, std::size_t total, double z = 1.959963984540054);

struct RarityEstimate {
    double threshold = 0.0;
    std::size_t hits = 0;
    std::size_t total = 0;
    double p_hat = 0.0;
    ProportionInterval ci95;
    bool operator==(const RarityEstimate &) const = default;
};

/// Fraction of instances whose max-peak is >= threshold, with a 95% Wilson interval.
RarityEstimate rarity_estimate(std::span<const double> max_peaks, double threshold);
RarityEstimate rarity_estimate(const EnsembleStats &ensemble, double threshold);

/// gamma / (delta^2 2^n): the Markov-type ceiling on the chance of a delta-peaked instance.
double rarity_bound(double gamma_hat, double threshold, int n);

struct DecayPoint {
    double n = 0.0;
    double delta = 0.0;
};

/// Least squares of log(delta) against n for delta = c a^{-n}. Needs >= 3 points and delta > 0.
DecayFit fit_exponential_decay(std::span<const DecayPoint> points);

}  // namespace peakcirc
