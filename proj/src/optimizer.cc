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

#include "peakcirc/optimizer.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include "peakcirc/errors.h"
#include "peakcirc/seeding.h"

namespace peakcirc {

void OptimizerConfig::validate() const {
    std::string bad;
    auto check = [&](bool ok, const char *name) {
        if (!ok) {
            bad += bad.empty() ? name : std::string(", ") + name;
        }
    };
    check(learning_rate > 0, "learning_rate");
    check(beta1 > 0 && beta1 < 1, "beta1");
    check(beta2 > 0 && beta2 < 1, "beta2");
    check(eps > 0, "eps");
    check(max_iters > 0, "max_iters");
    check(restarts >= 1, "restarts");
    check(plateau_tol > 0, "plateau_tol");
    check(plateau_window > 0, "plateau_window");
    check(init_scale > 0, "init_scale");
    check(restart_workers >= 1, "restart_workers");
    if (!bad.empty()) {
        throw ParameterError("invalid optimizer config: " + bad);
    }
}

PeakingObjective::PeakingObjective(const PeakedCircuitInstance &instance)
    : instance_(instance),
      random_output_(run_random_part(instance)),
      ket_(instance.num_qubits()),
      costate_(instance.num_qubits()),
      gates_(instance.layout_p().pair_count()) {
}

double PeakingObjective::value(std::span<const double> theta) const {
    StateVector state = random_output_;
    apply_peaking_layers(state, instance_, theta);
    return state.probability(0);
}

double PeakingObjective::value_and_gradient(std::span<const double> theta, std::span<double> grad) {
    instance_.check_params(theta);
    if (grad.size() != theta.size()) {
        throw ParameterError("gradient buffer has length " + std::to_string(grad.size()));
    }
    const auto &layers = instance_.layout_p().layers;

    ket_ = random_output_;
    std::size_t g = 0;
    for (const auto &layer : layers) {
        for (const auto &pair : layer) {
            gates_[g] = kak_gate(KakSpan(theta.subspan(g * kKakParamCount, kKakParamCount))).matrix;
            apply_two_qubit_gate(ket_, gates_[g], pair.a, pair.b);
            ++g;
        }
    }
    const cplx amplitude = ket_[0];

    std::fill(costate_.amps().begin(), costate_.amps().end(), cplx{0.0, 0.0});
    costate_[0] = 1.0;
    for (auto layer = layers.rbegin(); layer != layers.rend(); ++layer) {
        for (auto pair = layer->rbegin(); pair != layer->rend(); ++pair) {
            --g;
            Mat4 env = reverse_step(ket_, costate_, gates_[g].adjoint(), pair->a, pair->b);
            auto derivs = kak_gate_derivatives(KakSpan(theta.subspan(g * kKakParamCount, kKakParamCount)));
            for (std::size_t k = 0; k < kKakParamCount; ++k) {
                cplx d_amp = derivs[k].cwiseProduct(env).sum();
                grad[g * kKakParamCount + k] = 2.0 * (std::conj(amplitude) * d_amp).real();
            }
        }
    }
    return std::norm(amplitude);
}

ObjectiveAndGradient objective_and_gradient(const PeakedCircuitInstance &instance, std::span<const double> theta) {
    PeakingObjective objective(instance);
    ObjectiveAndGradient out;
    out.grad.assign(theta.size(), 0.0);
    out.delta = objective.value_and_gradient(theta, out.grad);
    return out;
}

void adam_step(std::span<double> theta, AdamMoments &moments, std::span<const double> grad,
               const OptimizerConfig &config) {
    if (theta.size() != grad.size() || moments.first.size() != theta.size() ||
        moments.second.size() != theta.size()) {
        throw ParameterError("adam_step: shape mismatch");
    }
    ++moments.step;
    const double t = static_cast<double>(moments.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t k = 0; k < theta.size(); ++k) {
        moments.first[k] = config.beta1 * moments.first[k] + (1.0 - config.beta1) * grad[k];
        moments.second[k] = config.beta2 * moments.second[k] + (1.0 - config.beta2) * grad[k] * grad[k];
        double m_hat = moments.first[k] / c1;
        double v_hat = moments.second[k] / c2;
        theta[k] += config.learning_rate * m_hat / (std::sqrt(v_hat) + config.eps);
    }
}

namespace {

struct RestartOutcome {
    RestartResult summary;
    std::vector<double> best_theta;
};

RestartOutcome run_restart(PeakingObjective &objective, const OptimizerConfig &config, std::uint64_t seed) {
    const std::size_t p = objective.param_count();
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, config.init_scale);
    std::vector<double> theta(p);
    for (auto &t : theta) {
        t = normal(rng);
    }
    std::vector<double> grad(p, 0.0);
    AdamMoments moments(p);

    RestartOutcome out;
    out.summary.seed = seed;
    out.best_theta = theta;
    double best = -1.0;
    std::vector<double> best_history;
    best_history.reserve(static_cast<std::size_t>(config.max_iters));

    for (int it = 0; it < config.max_iters; ++it) {
        double delta = objective.value_and_gradient(theta, grad);
        if (config.record_traces) {
            out.summary.trace.push_back(delta);
        }
        if (delta > best) {
            best = delta;
            out.best_theta = theta;
        }
        best_history.push_back(best);
        out.summary.iterations = it + 1;
        if (it + 1 == config.max_iters) {
            break;
        }
        auto window = static_cast<std::size_t>(config.plateau_window);
        if (best_history.size() > window) {
            double before = best_history[best_history.size() - 1 - window];
            if (best - before <= config.plateau_tol * before) {
                out.summary.converged = true;
                break;
            }
        }
        adam_step(theta, moments, grad, config);
    }
    out.summary.final_delta = best;
    return out;
}

}  // namespace

OptimizationResult optimize_peaking(const PeakedCircuitInstance &instance, int tau_p, const OptimizerConfig &config,
                                    std::uint64_t optimizer_seed) {
    config.validate();
    if (instance.tau_p() != 0) {
        throw ParameterError("optimize_peaking expects an instance without peaking layers");
    }
    std::size_t pairs = brickwall_layout(instance.num_qubits(), tau_p, instance.peaking_first_parity(config.parity))
                            .pair_count();
    PeakedCircuitInstance peaked =
        attach_peaking_layers(instance, tau_p, std::vector<double>(pairs * kKakParamCount, 0.0), config.parity);

    OptimizationResult result;
    result.instance_seed = instance.seed();
    result.optimizer_seed = optimizer_seed;
    if (tau_p == 0) {
        result.best_delta = run_random_part(instance).probability(0);
        result.per_restart.push_back({result.best_delta, 0, true, optimizer_seed, {}});
        return result;
    }

    auto restarts = static_cast<std::size_t>(config.restarts);
    std::vector<RestartOutcome> outcomes(restarts);
    auto worker = [&](std::size_t first, std::size_t stride) {
        PeakingObjective objective(peaked);
        for (std::size_t r = first; r < restarts; r += stride) {
            outcomes[r] = run_restart(objective, config, derive_seed(optimizer_seed, r));
        }
    };
    auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.restart_workers), restarts);
    if (workers <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker, w, workers);
        }
    }

    std::size_t best = 0;
    for (std::size_t r = 0; r < restarts; ++r) {
        if (outcomes[r].summary.final_delta > outcomes[best].summary.final_delta) {
            best = r;
        }
        result.per_restart.push_back(outcomes[r].summary);
    }
    result.best_delta = outcomes[best].summary.final_delta;
    result.best_theta = std::move(outcomes[best].best_theta);
    return result;
}

}  // namespace peakcirc
