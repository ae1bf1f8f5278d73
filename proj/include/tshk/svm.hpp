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
 * Soft-margin kernel SVM trained on a precomputed Gram matrix, decision
 * functions and per-time voting, classification metrics, kernel alignment
 * and spectral-shift (Tikhonov) regularization.
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tshk/kernel.hpp"

namespace tshk::svm {

struct SvmModel {
    std::vector<double> alpha;         ///< dual coefficients in [0, C]
    double bias{0.0};
    std::vector<std::size_t> support;  ///< indices with alpha > 0
    std::vector<int> labels;           ///< training labels
    double C{100.0};
    std::vector<double> train_decisions; ///< D(x_i) on the training rows
    int iterations{0};
};

/**
 * Maximize sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij subject to
 * 0 <= alpha <= C and sum alpha_i y_i = 0 by SMO with second-order
 * working-pair selection. Stops when the maximal KKT violation is below
 * `tol` or after 1e5 N pair updates. The bias averages y_i - f_i over
 * margin vectors (0 < alpha_i < C); without any, it is
 * -(max_{y=-1} f_i + min_{y=+1} f_i) / 2 where f is the bias-free decision.
 *
 * Throws UsageError for a non-square or non-symmetric Gram matrix, a label
 * count mismatch or a single-class label vector.
 */
SvmModel svm_fit(const Eigen::MatrixXd &gram, std::span<const int> labels, double C = 100.0,
                 double tol = 1e-6);

/// sum(alpha) - 1/2 alpha^T Y K Y alpha.
double dual_objective(const SvmModel &model, const Eigen::MatrixXd &gram);

/// sum_i alpha_i y_i k_i + b for one kernel row against the training set.
double decide(const SvmModel &model, std::span<const double> kernel_row);

/// Decision values for every row of an M x N cross-kernel.
std::vector<double> decide_rows(const SvmModel &model, const Eigen::MatrixXd &rows);

/// +1 for a non-negative decision value, -1 otherwise.
int predict_sign(double decision);

/**
 * sign(sum_l eta_l sign(D_l)), with exact ties resolved to +1.
 * `decisions[l]` is the decision value of slice model l for one instance.
 */
int per_time_vote(std::span<const double> decisions, const kernel::KernelWeights &weights);

/// Vote for every test row; rows[l] is the M x N cross-kernel of slice l.
std::vector<int> per_time_vote(std::span<const SvmModel> models,
                               std::span<const Eigen::MatrixXd> rows,
                               const kernel::KernelWeights &weights);

struct MetricsReport {
    double accuracy{0.0};
    double f1{0.0};
    double balanced_accuracy{0.0};
    double roc_auc{0.0};
    double alignment_train{0.0};
    double alignment_test{0.0};
};

/// Concordant-pair AUC with ties counted 1/2. Throws DegenerateError if
/// y_true holds a single class.
double roc_auc(std::span<const int> y_true, std::span<const double> scores);

/// Accuracy, F1 (positive class +1), balanced accuracy and AUC. Alignment
/// fields are left at zero.
MetricsReport metrics(std::span<const int> y_true, std::span<const int> y_pred,
                      std::span<const double> scores);

/// 1 - mean |K_ij - y_i y'_j| over all M x N elements.
double kernel_alignment(const Eigen::MatrixXd &k, std::span<const int> row_labels,
                        std::span<const int> col_labels);
double kernel_alignment(const Eigen::MatrixXd &k, std::span<const int> labels);

/// K - eps_min I when the smallest eigenvalue eps_min is negative, else K.
Eigen::MatrixXd tikhonov_regularize(const Eigen::MatrixXd &k);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd &k);

} // namespace tshk::svm
