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
/**
 * @file
 * Time-dependent fidelity kernels, per-time Gram stacks and the weighted
 * time-series kernel built from them.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tshk/ansatz.hpp"
#include "tshk/data.hpp"

namespace tshk::kernel {

/// Exact statevector probabilities, or shot estimates from seeded sampling.
struct EvalMode {
    enum class Kind { Exact, Shots };
    Kind kind{Kind::Exact};
    std::uint64_t shots{0};
    std::uint64_t seed{0};

    static EvalMode exact() { return {}; }
    static EvalMode sampled(std::uint64_t shots, std::uint64_t seed) {
        return {Kind::Shots, shots, seed};
    }
    [[nodiscard]] bool is_exact() const { return kind == Kind::Exact; }
};

/**
 * Fidelity kernel at evolution time t. In shot mode the all-zeros frequency
 * is estimated from `mode.shots` samples drawn with the seed
 * derive_seed(mode.seed, {stream}).
 */
double kappa_t(const ansatz::AnsatzSpec &spec, const ansatz::ParameterSet &theta,
               std::span<const double> x, std::span<const double> x_prime, double t,
               const EvalMode &mode, std::uint64_t stream = 0);

/// p Gram matrices, one per evolution time.
struct GramStack {
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> mats;
    EvalMode mode;

    [[nodiscard]] std::size_t p() const { return mats.size(); }
};

/**
 * K_l[i][j] = kappa(x_i at l, x_j at l) at evolution time times[l]. Only the
 * upper triangle is evaluated and mirrored; in exact mode the diagonal is 1.
 * Cells are evaluated on up to `threads` workers; results are independent of
 * the worker count. Throws UsageError if an instance's length differs from
 * times.size().
 */
GramStack gram_stack(const ansatz::AnsatzSpec &spec, const ansatz::ParameterSet &theta,
                     std::span<const data::Instance> instances, std::span<const double> times,
                     const EvalMode &mode, int threads = 1);

/// Element-wise sum of all slices (the equally weighted Gram matrix).
Eigen::MatrixXd sum_slices(const GramStack &stack);

/// Convex kernel weights over the time slices.
struct KernelWeights {
    std::vector<double> eta;

    /// Clamp entries to >= 0 and rescale to unit sum. Throws DegenerateError
    /// if the clamped sum is zero.
    static KernelWeights normalized(std::vector<double> raw);
    static KernelWeights uniform(std::size_t p);
};

/// sum_l eta_l K_l.
Eigen::MatrixXd combined_kernel(const GramStack &stack, const KernelWeights &weights);

/// A trained kernel: circuit parameters, time weights, time grid and the
/// feature scaling fitted on the training set.
struct TrainedTSHK {
    ansatz::AnsatzSpec spec;
    ansatz::ParameterSet theta;
    KernelWeights weights;
    std::vector<double> times;
    /// When set, every slice is evolved to this time instead of its own.
    std::optional<double> fixed_evolution_time;
    data::Scaler scaling;
    std::uint64_t seed{0};

    /// Evolution time used for each slice.
    [[nodiscard]] std::vector<double> evolution_times() const;
};

struct CrossGram {
    GramStack stack;          ///< M x N slices, rows index test instances
    Eigen::MatrixXd combined; ///< weighted with the model's eta
};

/// Kernel rows for `test` against `train`. Both must be already scaled.
CrossGram cross_gram(const TrainedTSHK &model, std::span<const data::Instance> train,
                     std::span<const data::Instance> test, const EvalMode &mode,
                     int threads = 1);

/// One CSV per slice (`slice_000.csv`, ...) plus `manifest.json` with the
/// times, matrix shape and evaluation mode.
void write_gram_stack(const GramStack &stack, const std::filesystem::path &dir);

} // namespace tshk::kernel
