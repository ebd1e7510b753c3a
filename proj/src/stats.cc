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

#include "peakcirc/stats.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "peakcirc/errors.h"

namespace peakcirc {

OutputDistribution output_distribution(const StateVector &state) {
    OutputDistribution out;
    out.probs.resize(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        out.probs[i] = state.probability(i);
    }
    return out;
}

std::vector<double> sorted_distribution(const StateVector &state) {
    std::vector<double> probs = output_distribution(state).probs;
    std::sort(probs.begin(), probs.end(), std::greater<>());
    return probs;
}

double collision_probability(const StateVector &state) {
    double total = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        double p = state.probability(i);
        total += p * p;
    }
    return total;
}

double entanglement_entropy_halfchain(const StateVector &state) {
    int n = state.num_qubits();
    if (n % 2 != 0) {
        throw SizeError("half-chain entropy needs even n, got " + std::to_string(n));
    }
    const Eigen::Index dim = Eigen::Index{1} << (n / 2);
    using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> amps(state.amps().data(), dim, dim);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(amps);
    double entropy = 0.0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
        double lambda = svd.singularValues()(k) * svd.singularValues()(k);
        if (lambda > 0.0) {
            entropy -= lambda * std::log2(lambda);
        }
    }
    return std::max(entropy, 0.0);
}

double page_entropy_bits(int n) {
    if (n < 2 || n % 2 != 0) {
        throw SizeError("Page value needs even n >= 2");
    }
    // S = sum_{k=m+1}^{m^2} 1/k - (m-1)/(2m) nats for an m x m split.
    const double m = std::ldexp(1.0, n / 2);
    double nats = 0.0;
    for (double k = m * m; k > m; k -= 1.0) {
        nats += 1.0 / k;
    }
    nats -= (m - 1.0) / (2.0 * m);
    return nats / std::log(2.0);
}

MeanAndError mean_and_error(std::span<const double> values) {
    MeanAndError out;
    if (values.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const auto count = static_cast<double>(values.size());
    out.mean = sum / count;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.variance = ss / (count - 1.0);
        out.std_error = std::sqrt(out.variance / count);
    }
    return out;
}

EnsembleStats summarize_ensemble(int n, std::vector<InstanceSample> samples) {
    if (samples.empty()) {
        throw ParameterError("empty ensemble");
    }
    EnsembleStats out;
    out.n = n;
    std::vector<double> deltas, pis;
    for (const auto &s : samples) {
        deltas.push_back(s.delta);
        pis.push_back(s.pi);
    }
    MeanAndError d = mean_and_error(deltas);
    out.mean_delta = d.mean;
    out.var_delta = d.variance;
    out.stderr_delta = d.std_error;
    out.max_delta = *std::max_element(deltas.begin(), deltas.end());
    out.mean_pi = mean_and_error(pis).mean;
    out.gamma_hat = std::ldexp(out.mean_pi, n);
    out.samples = std::move(samples);
    return out;
}

ProportionInterval wilson_interval(std::size_t hits, std::size_t total, double z) {
    if (total == 0) {
        return {0.0, 1.0};
    }
    const double nn = static_cast<double>(total);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

RarityEstimate rarity_estimate(std::span<const double> max_peaks, double threshold) {
    if (max_peaks.empty()) {
        throw ParameterError("rarity estimate of an empty ensemble");
    }
    RarityEstimate out;
    out.threshold = threshold;
    out.total = max_peaks.size();
    out.hits = static_cast<std::size_t>(
        std::count_if(max_peaks.begin(), max_peaks.end(), [&](double v) { return v >= threshold; }));
    out.p_hat = static_cast<double>(out.hits) / static_cast<double>(out.total);
    out.ci95 = wilson_interval(out.hits, out.total);
    return out;
}

RarityEstimate rarity_estimate(const EnsembleStats &ensemble, double threshold) {
    std::vector<double> peaks;
    peaks.reserve(ensemble.samples.size());
    for (const auto &s : ensemble.samples) {
        peaks.push_back(s.max_peak);
    }
    return rarity_estimate(peaks, threshold);
}

double rarity_bound(double gamma_hat, double threshold, int n) {
    return gamma_hat / (threshold * threshold * std::ldexp(1.0, n));
}

DecayFit fit_exponential_decay(std::span<const DecayPoint> points) {
    if (points.size() < 3) {
        throw ParameterError("exponential fit needs at least 3 points, got " + std::to_string(points.size()));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto &p : points) {
        if (!(p.delta > 0.0)) {
            throw DomainError("exponential fit needs positive peak weights, got " + std::to_string(p.delta));
        }
        double y = std::log(p.delta);
        sx += p.n;
        sy += y;
        sxx += p.n * p.n;
        sxy += p.n * y;
    }
    const auto m = static_cast<double>(points.size());
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) {
        throw DomainError("exponential fit needs at least two distinct n");
    }
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    DecayFit fit;
    fit.c = std::exp(intercept);
    fit.a = std::exp(-slope);
    for (const auto &p : points) {
        fit.residuals.push_back(std::log(p.delta) - (intercept + slope * p.n));
    }
    return fit;
}

}  // namespace peakcirc
