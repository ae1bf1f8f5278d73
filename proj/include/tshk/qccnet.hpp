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
 * Kernel training as a max-min problem: the margin-distribution (KOMD)
 * objective is minimized over class-wise simplex dual variables by a convex
 * solver, and maximized over circuit parameters by Adam ascent with
 * parameter-shift gradients taken at the fixed inner optimum.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tshk/ansatz.hpp"
#include "tshk/data.hpp"
#include "tshk/kernel.hpp"
#include "tshk/random.hpp"

namespace tshk::qccnet {

/// Loss (1 - lambda) phi^T Y K Y phi + lambda |phi|^2 over a labelled kernel.
struct KomdProblem {
    Eigen::MatrixXd kernel;
    std::vector<int> labels;
    double lambda{0.1};
};

struct DualSolution {
    Eigen::VectorXd phi;
    double loss_value{0.0};
    double kkt_residual{0.0};
    int iterations{0};
};

double komd_loss(const KomdProblem &problem, const Eigen::VectorXd &phi);

/**
 * Minimize the KOMD loss over phi >= 0 with each class summing to one.
 *
 * Accelerated projected gradient with step 1/L, L = 2((1 - lambda)|K|_2 +
 * lambda), adaptive momentum restart and exact sort-based simplex
 * projection. Stops once the gradient-mapping residual
 * L |phi - P(phi - grad / L)|_inf drops to `tol` or after `max_iter`
 * iterations. Throws TrainingError if a class is missing.
 */
DualSolution solve_inner(const KomdProblem &problem, double tol = 1e-8, int max_iter = 10000);

/// Euclidean projection of v onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd &v);

/// Gram stack of a batch together with the shift-rule gradient of every
/// evaluated off-diagonal cell.
struct GramGradients {
    kernel::GramStack stack;
    std::vector<std::pair<std::size_t, std::size_t>> pairs; ///< i < j
    /// cell_gradients[l * pairs.size() + c] = dK_l[i][j] / dtheta for pair c.
    std::vector<std::vector<double>> cell_gradients;
};

GramGradients gram_with_gradients(const ansatz::AnsatzSpec &spec,
                                  const ansatz::ParameterSet &theta,
                                  std::span<const data::Instance> batch,
                                  std::span<const double> times, int threads = 1);

/// (1 - lambda) sum_{i,j} phi_i phi_j y_i y_j sum_l dK_l[i][j]/dtheta.
std::vector<double> contract_gradient(const GramGradients &grads, const Eigen::VectorXd &phi,
                                      std::span<const int> labels, double lambda);

/**
 * Gradient of min_phi L(theta, phi) with respect to the flat theta at the
 * inner optimum `phi_star`, which is held fixed (envelope theorem).
 */
std::vector<double> outer_gradient(const ansatz::AnsatzSpec &spec,
                                   const ansatz::ParameterSet &theta,
                                   std::span<const data::Instance> batch,
                                   std::span<const double> times, const Eigen::VectorXd &phi_star,
                                   double lambda, int threads = 1);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    int step{0};
};

/// One Adam step taken uphill: params += lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(std::vector<double> &params, std::span<const double> grad, AdamState &state,
               double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

/**
 * Indices of a uniform sample without replacement of size `batch_size`,
 * redrawn until both classes are present.
 */
std::vector<std::size_t> sample_batch(std::span<const int> labels, std::size_t batch_size,
                                      Rng &rng);

/// eta_l proportional to phi^T Y K_l Y phi, clamped at 0 and normalized.
kernel::KernelWeights extract_weights(const kernel::GramStack &stack, std::span<const int> labels,
                                      const Eigen::VectorXd &phi);

struct TrainConfig {
    int iterations{250};
    std::size_t batch_size{4};
    double lambda{0.1};
    double learning_rate{0.05};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
    int restarts{1};
    std::uint64_t seed{0};
    double inner_tol{1e-8};
    int inner_max_iter{10000};
    int threads{1};
    /// Evolve every slice to this time instead of its own (time-independent ablation).
    std::optional<double> fixed_evolution_time;

    void validate() const;
};

struct RestartRecord {
    std::uint64_t seed{0};
    std::vector<double> loss_trace; ///< inner optimum per iteration
    double eval_loss{0.0};
    bool ok{true};
    std::string message;
};

struct TrainResult {
    kernel::TrainedTSHK model;
    std::vector<RestartRecord> restarts;
    std::size_t best_restart{0};
    DualSolution final_solution;
};

/**
 * Run `restarts` independent optimizations from Uniform[-pi, pi) starts,
 * keep the one with the largest inner optimum on `eval`, then solve the
 * inner problem once more on the whole training set to extract the kernel
 * weights. Datasets must already be scaled; the returned model's `scaling`
 * is left empty for the caller to fill.
 */
TrainResult train(const data::Dataset &train_set, const data::Dataset &eval_set,
                  const ansatz::AnsatzSpec &spec, const TrainConfig &config);

} // namespace tshk::qccnet
