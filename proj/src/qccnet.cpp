// Copyright 2026 The TSHK Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "tshk/qccnet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "tshk/error.hpp"
#include "tshk/parallel.hpp"

namespace tshk::qccnet {

namespace {

struct ClassIndex {
    std::vector<Eigen::Index> pos;
    std::vector<Eigen::Index> neg;
};

ClassIndex split_classes(std::span<const int> labels) {
    ClassIndex idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) {
            idx.pos.push_back(static_cast<Eigen::Index>(i));
        } else if (labels[i] == -1) {
            idx.neg.push_back(static_cast<Eigen::Index>(i));
        } else {
            throw UsageError("label " + std::to_string(labels[i]) + " is not +1 or -1");
        }
    }
    return idx;
}

Eigen::VectorXd signs(std::span<const int> labels) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        y(static_cast<Eigen::Index>(i)) = labels[i];
    }
    return y;
}

// Project each class block onto its own simplex.
Eigen::VectorXd project_feasible(const Eigen::VectorXd &v, const ClassIndex &idx) {
    Eigen::VectorXd out(v.size());
    for (const auto *block : {&idx.pos, &idx.neg}) {
        Eigen::VectorXd sub(static_cast<Eigen::Index>(block->size()));
        for (std::size_t k = 0; k < block->size(); ++k) {
            sub(static_cast<Eigen::Index>(k)) = v((*block)[k]);
        }
        const auto proj = project_simplex(sub);
        for (std::size_t k = 0; k < block->size(); ++k) {
            out((*block)[k]) = proj(static_cast<Eigen::Index>(k));
        }
    }
    return out;
}

double quadratic_form(const Eigen::MatrixXd &k, const Eigen::VectorXd &yphi) {
    return yphi.dot(k * yphi);
}

} // namespace

double komd_loss(const KomdProblem &problem, const Eigen::VectorXd &phi) {
    const auto n = static_cast<Eigen::Index>(problem.labels.size());
    if (problem.kernel.rows() != n || problem.kernel.cols() != n || phi.size() != n) {
        throw UsageError("KOMD problem dimensions disagree: kernel " +
                         std::to_string(problem.kernel.rows()) + "x" +
                         std::to_string(problem.kernel.cols()) + ", " + std::to_string(n) +
                         " labels, phi of length " + std::to_string(phi.size()));
    }
    const Eigen::VectorXd yphi = signs(problem.labels).cwiseProduct(phi);
    return (1.0 - problem.lambda) * quadratic_form(problem.kernel, yphi) +
           problem.lambda * phi.squaredNorm();
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd &v) {
    if (v.size() == 0) {
        throw UsageError("cannot project an empty vector onto the simplex");
    }
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double tau = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumsum += u[k];
        const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (u[k] - candidate > 0.0) {
            tau = candidate;
        }
    }
    return (v.array() - tau).cwiseMax(0.0);
}

DualSolution solve_inner(const KomdProblem &problem, double tol, int max_iter) {
    const auto idx = split_classes(problem.labels);
    if (idx.pos.empty() || idx.neg.empty()) {
        throw TrainingError("KOMD loss is undefined without both classes");
    }
    if (problem.lambda < 0.0 || problem.lambda > 1.0) {
        throw ConfigError("lambda must lie in [0, 1]");
    }
    const auto n = static_cast<Eigen::Index>(problem.labels.size());
    if (problem.kernel.rows() != n || problem.kernel.cols() != n) {
        throw UsageError("kernel is " + std::to_string(problem.kernel.rows()) + "x" +
                         std::to_string(problem.kernel.cols()) + " for " + std::to_string(n) +
                         " labels");
    }

    // Q = (1 - lambda) Y K Y + lambda I, loss = phi^T Q phi, gradient 2 Q phi.
    const Eigen::VectorXd y = signs(problem.labels);
    const Eigen::MatrixXd sym = 0.5 * (problem.kernel + problem.kernel.transpose());
    Eigen::MatrixXd q = (1.0 - problem.lambda) * (y.asDiagonal() * sym * y.asDiagonal());
    q.diagonal().array() += problem.lambda;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    const double spectral = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double lip = std::max(2.0 * ((1.0 - problem.lambda) * spectral + problem.lambda), 1e-12);

    auto grad = [&](const Eigen::VectorXd &phi) -> Eigen::VectorXd { return 2.0 * q * phi; };
    auto residual = [&](const Eigen::VectorXd &phi, const Eigen::VectorXd &g) {
        return lip * (phi - project_feasible(phi - g / lip, idx)).cwiseAbs().maxCoeff();
    };

    Eigen::VectorXd phi(n);
    for (auto i : idx.pos) {
        phi(i) = 1.0 / static_cast<double>(idx.pos.size());
    }
    for (auto i : idx.neg) {
        phi(i) = 1.0 / static_cast<double>(idx.neg.size());
    }

    Eigen::VectorXd g = grad(phi);
    double res = residual(phi, g);
    Eigen::VectorXd prev = phi;
    double momentum = 1.0;
    int it = 0;
    while (res > tol && it < max_iter) {
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const Eigen::VectorXd look = phi + ((momentum - 1.0) / next_momentum) * (phi - prev);
        const Eigen::VectorXd g_look = grad(look);
        Eigen::VectorXd next = project_feasible(look - g_look / lip, idx);
        if (g_look.dot(next - phi) > 0.0) {
            // Momentum overshoot: fall back to a plain projected step.
            next = project_feasible(phi - g / lip, idx);
            momentum = 1.0;
        } else {
            momentum = next_momentum;
        }
        prev = phi;
        phi = next;
        g = grad(phi);
        res = residual(phi, g);
        ++it;
    }

    DualSolution sol;
    sol.phi = phi;
    sol.loss_value = komd_loss(problem, phi);
    sol.kkt_residual = res;
    sol.iterations = it;
    return sol;
}

GramGradients gram_with_gradients(const ansatz::AnsatzSpec &spec,
                                  const ansatz::ParameterSet &theta,
                                  std::span<const data::Instance> batch,
                                  std::span<const double> times, int threads) {
    spec.validate();
    theta.check(spec);
    const std::size_t n = batch.size();
    const std::size_t p = times.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(batch[i].p) != p) {
            throw UsageError("instance " + std::to_string(i) + " has " +
                             std::to_string(batch[i].p) + " time steps, grid has " +
                             std::to_string(p));
        }
    }
    GramGradients out;
    out.stack.times.assign(times.begin(), times.end());
    out.stack.mode = kernel::EvalMode::exact();
    out.stack.mats.assign(p, Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                       static_cast<Eigen::Index>(n)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            out.pairs.emplace_back(i, j);
        }
    }
    const std::size_t n_params = spec.parameter_count();
    const std::size_t cells = p * out.pairs.size();
    std::vector<double> values(cells);
    out.cell_gradients.resize(cells);
    parallel_for(cells, threads, [&](std::size_t c) {
        const std::size_t l = c / out.pairs.size();
        const auto [i, j] = out.pairs[c % out.pairs.size()];
        const int li = static_cast<int>(l);
        const auto program =
            ansatz::build_kernel_circuit(spec, batch[i].at(li), batch[j].at(li), theta, times[l]);
        auto vg = ansatz::prob_zero_gradient(program, spec.n_qubits, n_params);
        values[c] = vg.value;
        out.cell_gradients[c] = std::move(vg.gradient);
    });
    for (std::size_t c = 0; c < cells; ++c) {
        const std::size_t l = c / out.pairs.size();
        const auto [i, j] = out.pairs[c % out.pairs.size()];
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        out.stack.mats[l](ii, jj) = values[c];
        out.stack.mats[l](jj, ii) = values[c];
    }
    return out;
}

std::vector<double> contract_gradient(const GramGradients &grads, const Eigen::VectorXd &phi,
                                      std::span<const int> labels, double lambda) {
    if (static_cast<std::size_t>(phi.size()) != labels.size()) {
        throw UsageError("phi has " + std::to_string(phi.size()) + " entries for " +
                         std::to_string(labels.size()) + " labels");
    }
    std::vector<double> out;
    if (grads.cell_gradients.empty()) {
        return out;
    }
    out.assign(grads.cell_gradients.front().size(), 0.0);
    const std::size_t n_pairs = grads.pairs.size();
    for (std::size_t c = 0; c < grads.cell_gradients.size(); ++c) {
        const auto [i, j] = grads.pairs[c % n_pairs];
        // Both (i, j) and (j, i) contribute; diagonal cells are constant.
        const double w = 2.0 * (1.0 - lambda) * phi(static_cast<Eigen::Index>(i)) *
                         phi(static_cast<Eigen::Index>(j)) * labels[i] * labels[j];
        if (w == 0.0) {
            continue;
        }
        const auto &g = grads.cell_gradients[c];
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += w * g[k];
        }
    }
    return out;
}

std::vector<double> outer_gradient(const ansatz::AnsatzSpec &spec,
                                   const ansatz::ParameterSet &theta,
                                   std::span<const data::Instance> batch,
                                   std::span<const double> times, const Eigen::VectorXd &phi_star,
                                   double lambda, int threads) {
    std::vector<int> labels;
    labels.reserve(batch.size());
    for (const auto &inst : batch) {
        labels.push_back(inst.label);
    }
    const auto grads = gram_with_gradients(spec, theta, batch, times, threads);
    auto out = contract_gradient(grads, phi_star, labels, lambda);
    if (out.empty()) {
        out.assign(spec.parameter_count(), 0.0);
    }
    return out;
}

void adam_step(std::vector<double> &params, std::span<const double> grad, AdamState &state,
               double lr, double beta1, double beta2, double eps) {
    if (grad.size() != params.size()) {
        throw UsageError("gradient has " + std::to_string(grad.size()) + " entries for " +
                         std::to_string(params.size()) + " parameters");
    }
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(beta1, state.step);
    const double c2 = 1.0 - std::pow(beta2, state.step);
    for (std::size_t k = 0; k < params.size(); ++k) {
        state.m[k] = beta1 * state.m[k] + (1.0 - beta1) * grad[k];
        state.v[k] = beta2 * state.v[k] + (1.0 - beta2) * grad[k] * grad[k];
        const double m_hat = state.m[k] / c1;
        const double v_hat = state.v[k] / c2;
        params[k] += lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

std::vector<std::size_t> sample_batch(std::span<const int> labels, std::size_t batch_size,
                                      Rng &rng) {
    const std::size_t n = labels.size();
    if (batch_size < 2) {
        throw ConfigError("batch size must be at least 2");
    }
    if (batch_size > n) {
        throw ConfigError("batch size " + std::to_string(batch_size) + " exceeds dataset size " +
                          std::to_string(n));
    }
    const auto idx = split_classes(labels);
    if (idx.pos.empty() || idx.neg.empty()) {
        throw TrainingError("dataset contains a single class; no valid batch exists");
    }
    std::vector<std::size_t> pool(n);
    while (true) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        // Partial Fisher-Yates: the first batch_size entries are a uniform sample.
        for (std::size_t k = 0; k < batch_size; ++k) {
            const auto r = k + static_cast<std::size_t>(uniform_index(rng, n - k));
            std::swap(pool[k], pool[r]);
        }
        bool pos = false;
        bool neg = false;
        for (std::size_t k = 0; k < batch_size; ++k) {
            (labels[pool[k]] == 1 ? pos : neg) = true;
        }
        if (pos && neg) {
            return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(batch_size)};
        }
    }
}

kernel::KernelWeights extract_weights(const kernel::GramStack &stack, std::span<const int> labels,
                                      const Eigen::VectorXd &phi) {
    if (static_cast<std::size_t>(phi.size()) != labels.size()) {
        throw UsageError("phi has " + std::to_string(phi.size()) + " entries for " +
                         std::to_string(labels.size()) + " labels");
    }
    const Eigen::VectorXd yphi = signs(labels).cwiseProduct(phi);
    std::vector<double> raw;
    raw.reserve(stack.p());
    for (const auto &k : stack.mats) {
        if (k.rows() != phi.size() || k.cols() != phi.size()) {
            throw UsageError("Gram slice is " + std::to_string(k.rows()) + "x" +
                             std::to_string(k.cols()) + " for " + std::to_string(phi.size()) +
                             " dual variables");
        }
        raw.push_back(quadratic_form(k, yphi));
    }
    return kernel::KernelWeights::normalized(std::move(raw));
}

void TrainConfig::validate() const {
    if (iterations < 0) {
        throw ConfigError("iterations must be non-negative");
    }
    if (batch_size < 2) {
        throw ConfigError("batch_size must be at least 2");
    }
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw ConfigError("lambda must lie in (0, 1] for training");
    }
    if (!(learning_rate > 0.0)) {
        throw ConfigError("learning_rate must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
        throw ConfigError("Adam moments must lie in [0, 1) and epsilon must be positive");
    }
    if (restarts < 1) {
        throw ConfigError("restarts must be at least 1");
    }
    if (!(inner_tol > 0.0) || inner_max_iter < 1) {
        throw ConfigError("inner_tol must be positive and inner_max_iter at least 1");
    }
    if (threads < 1) {
        throw ConfigError("threads must be at least 1");
    }
}

TrainResult train(const data::Dataset &train_set, const data::Dataset &eval_set,
                  const ansatz::AnsatzSpec &spec, const TrainConfig &config) {
    config.validate();
    spec.validate();
    train_set.validate();
    eval_set.validate();
    if (train_set.d != spec.n_features || eval_set.d != spec.n_features) {
        throw ConfigError("dataset has " + std::to_string(train_set.d) +
                          " features, ansatz expects " + std::to_string(spec.n_features));
    }
    if (config.batch_size > train_set.size()) {
        throw ConfigError("batch_size " + std::to_string(config.batch_size) +
                          " exceeds training set size " + std::to_string(train_set.size()));
    }
    if (!train_set.has_both_classes() || !eval_set.has_both_classes()) {
        throw TrainingError("training and evaluation sets must contain both classes");
    }

    std::vector<double> times = train_set.times;
    if (config.fixed_evolution_time) {
        times.assign(times.size(), *config.fixed_evolution_time);
    }
    const auto train_labels = train_set.labels();
    const auto eval_labels = eval_set.labels();

    auto inner_on = [&](const data::Dataset &ds, const std::vector<int> &labels,
                        const ansatz::ParameterSet &theta) {
        const auto stack = kernel::gram_stack(spec, theta, ds.instances, times,
                                              kernel::EvalMode::exact(), config.threads);
        KomdProblem problem{kernel::sum_slices(stack), labels, config.lambda};
        return std::make_pair(stack, solve_inner(problem, config.inner_tol,
                                                 config.inner_max_iter));
    };

    TrainResult result;
    std::vector<ansatz::ParameterSet> finals;
    for (int r = 0; r < config.restarts; ++r) {
        RestartRecord rec;
        rec.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(r)});
        Rng rng(rec.seed);
        auto theta = ansatz::ParameterSet::random(spec, rng);
        auto flat = theta.flat();
        AdamState adam;
        try {
            for (int it = 0; it < config.iterations; ++it) {
                const auto picks = sample_batch(train_labels, config.batch_size, rng);
                std::vector<data::Instance> batch;
                std::vector<int> labels;
                for (auto k : picks) {
                    batch.push_back(train_set.instances[k]);
                    labels.push_back(train_labels[k]);
                }
                const auto grads = gram_with_gradients(spec, theta, batch, times, config.threads);
                KomdProblem problem{kernel::sum_slices(grads.stack), labels, config.lambda};
                const auto sol = solve_inner(problem, config.inner_tol, config.inner_max_iter);
                if (!std::isfinite(sol.loss_value)) {
                    throw TrainingError("non-finite loss at iteration " + std::to_string(it));
                }
                rec.loss_trace.push_back(sol.loss_value);
                auto g = contract_gradient(grads, sol.phi, labels, config.lambda);
                if (g.empty()) {
                    g.assign(flat.size(), 0.0);
                }
                if (!std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); })) {
                    throw TrainingError("non-finite gradient at iteration " + std::to_string(it));
                }
                adam_step(flat, g, adam, config.learning_rate, config.beta1, config.beta2,
                          config.epsilon);
                theta = ansatz::ParameterSet::from_flat(spec, flat);
            }
            rec.eval_loss = inner_on(eval_set, eval_labels, theta).second.loss_value;
            if (!std::isfinite(rec.eval_loss)) {
                throw TrainingError("non-finite evaluation loss");
            }
        } catch (const TrainingError &e) {
            rec.ok = false;
            rec.message = e.what();
        }
        result.restarts.push_back(std::move(rec));
        finals.push_back(theta);
    }

    bool found = false;
    for (std::size_t r = 0; r < result.restarts.size(); ++r) {
        const auto &rec = result.restarts[r];
        if (rec.ok && (!found || rec.eval_loss > result.restarts[result.best_restart].eval_loss)) {
            result.best_restart = r;
            found = true;
        }
    }
    if (!found) {
        throw TrainingError("every restart failed");
    }

    const auto &best = finals[result.best_restart];
    auto [stack, sol] = inner_on(train_set, train_labels, best);
    result.final_solution = sol;
    result.model.spec = spec;
    result.model.theta = best;
    result.model.weights = extract_weights(stack, train_labels, sol.phi);
    result.model.times = train_set.times;
    result.model.fixed_evolution_time = config.fixed_evolution_time;
    result.model.seed = config.seed;
    return result;
}

} // namespace tshk::qccnet
