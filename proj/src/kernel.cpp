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
#include "tshk/kernel.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>

#include <json.hpp>

#include "tshk/error.hpp"
#include "tshk/parallel.hpp"
#include "tshk/random.hpp"

namespace tshk::kernel {

namespace {

// Stream-domain tags keep Gram and cross-Gram shot seeds disjoint.
constexpr std::uint64_t kGramDomain = 1;
constexpr std::uint64_t kCrossDomain = 2;

void check_lengths(std::span<const data::Instance> instances, std::size_t p) {
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (static_cast<std::size_t>(instances[i].p) != p) {
            throw UsageError("instance " + std::to_string(i) + " has " +
                             std::to_string(instances[i].p) + " time steps, grid has " +
                             std::to_string(p));
        }
    }
}

} // namespace

double kappa_t(const ansatz::AnsatzSpec &spec, const ansatz::ParameterSet &theta,
               std::span<const double> x, std::span<const double> x_prime, double t,
               const EvalMode &mode, std::uint64_t stream) {
    const auto program = ansatz::build_kernel_circuit(spec, x, x_prime, theta, t);
    const auto state = sim::run(program, spec.n_qubits);
    if (mode.is_exact()) {
        return sim::prob_all_zeros(state);
    }
    const auto shots = sim::sample_shots(state, mode.shots, derive_seed(mode.seed, {stream}));
    const auto zeros = std::count(shots.begin(), shots.end(), std::uint64_t{0});
    return static_cast<double>(zeros) / static_cast<double>(mode.shots);
}

GramStack gram_stack(const ansatz::AnsatzSpec &spec, const ansatz::ParameterSet &theta,
                     std::span<const data::Instance> instances, std::span<const double> times,
                     const EvalMode &mode, int threads) {
    check_lengths(instances, times.size());
    const std::size_t n = instances.size();
    const std::size_t p = times.size();
    GramStack stack{{times.begin(), times.end()}, {}, mode};
    stack.mats.assign(p, Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n)));

    // Upper-triangle cells (including the diagonal in shot mode).
    const bool with_diag = !mode.is_exact();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = with_diag ? i : i + 1; j < n; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    const std::size_t cells = pairs.size() * p;
    std::vector<double> values(cells);
    parallel_for(cells, threads, [&](std::size_t c) {
        const std::size_t l = c / pairs.size();
        const auto [i, j] = pairs[c % pairs.size()];
        const int li = static_cast<int>(l);
        values[c] = kappa_t(spec, theta, instances[i].at(li), instances[j].at(li), times[l], mode,
                            derive_seed(kGramDomain, {l, i, j}));
    });
    for (std::size_t c = 0; c < cells; ++c) {
        const std::size_t l = c / pairs.size();
        const auto [i, j] = pairs[c % pairs.size()];
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        stack.mats[l](ii, jj) = values[c];
        stack.mats[l](jj, ii) = values[c];
    }
    return stack;
}

Eigen::MatrixXd sum_slices(const GramStack &stack) {
    if (stack.mats.empty()) {
        throw UsageError("empty Gram stack");
    }
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(stack.mats[0].rows(), stack.mats[0].cols());
    for (const auto &m : stack.mats) {
        total += m;
    }
    return total;
}

KernelWeights KernelWeights::normalized(std::vector<double> raw) {
    double total = 0.0;
    for (auto &v : raw) {
        v = std::max(v, 0.0);
        total += v;
    }
    if (!(total > 0.0)) {
        throw DegenerateError("kernel weights sum to zero");
    }
    for (auto &v : raw) {
        v /= total;
    }
    return {std::move(raw)};
}

KernelWeights KernelWeights::uniform(std::size_t p) {
    return {std::vector<double>(p, 1.0 / static_cast<double>(p))};
}

Eigen::MatrixXd combined_kernel(const GramStack &stack, const KernelWeights &weights) {
    if (weights.eta.size() != stack.p()) {
        throw UsageError("weight vector has " + std::to_string(weights.eta.size()) +
                         " entries for " + std::to_string(stack.p()) + " slices");
    }
    if (stack.mats.empty()) {
        throw UsageError("empty Gram stack");
    }
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(stack.mats[0].rows(), stack.mats[0].cols());
    for (std::size_t l = 0; l < stack.p(); ++l) {
        total += weights.eta[l] * stack.mats[l];
    }
    return total;
}

std::vector<double> TrainedTSHK::evolution_times() const {
    if (fixed_evolution_time) {
        return std::vector<double>(times.size(), *fixed_evolution_time);
    }
    return times;
}

CrossGram cross_gram(const TrainedTSHK &model, std::span<const data::Instance> train,
                     std::span<const data::Instance> test, const EvalMode &mode, int threads) {
    const auto times = model.evolution_times();
    check_lengths(train, times.size());
    check_lengths(test, times.size());
    const std::size_t m = test.size();
    const std::size_t n = train.size();
    const std::size_t p = times.size();
    CrossGram out;
    out.stack = {times, {}, mode};
    out.stack.mats.assign(p, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                   static_cast<Eigen::Index>(n)));
    const std::size_t cells = p * m * n;
    std::vector<double> values(cells);
    parallel_for(cells, threads, [&](std::size_t c) {
        const std::size_t l = c / (m * n);
        const std::size_t i = (c / n) % m;
        const std::size_t j = c % n;
        const int li = static_cast<int>(l);
        values[c] = kappa_t(model.spec, model.theta, test[i].at(li), train[j].at(li), times[l],
                            mode, derive_seed(kCrossDomain, {l, i, j}));
    });
    for (std::size_t c = 0; c < cells; ++c) {
        out.stack.mats[c / (m * n)](static_cast<Eigen::Index>((c / n) % m),
                                    static_cast<Eigen::Index>(c % n)) = values[c];
    }
    out.combined = combined_kernel(out.stack, model.weights);
    return out;
}

void write_gram_stack(const GramStack &stack, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t l = 0; l < stack.p(); ++l) {
        char name[32];
        std::snprintf(name, sizeof name, "slice_%03zu.csv", l);
        std::ofstream out(dir / name);
        if (!out) {
            throw IngestionError("cannot write " + (dir / name).string());
        }
        out << std::setprecision(17);
        const auto &mat = stack.mats[l];
        for (Eigen::Index i = 0; i < mat.rows(); ++i) {
            for (Eigen::Index j = 0; j < mat.cols(); ++j) {
                out << (j == 0 ? "" : ",") << mat(i, j);
            }
            out << '\n';
        }
    }
    nlohmann::json manifest = {
        {"times", stack.times},
        {"rows", stack.mats.empty() ? 0 : stack.mats[0].rows()},
        {"cols", stack.mats.empty() ? 0 : stack.mats[0].cols()},
        {"mode", stack.mode.is_exact() ? "exact" : "shots"},
        {"shots", stack.mode.shots},
        {"seed", stack.mode.seed},
    };
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

} // namespace tshk::kernel
