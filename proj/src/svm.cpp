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
#include "tshk/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "tshk/error.hpp"

namespace tshk::svm {

namespace {

constexpr double kTau = 1e-12;

void check_symmetric(const Eigen::MatrixXd &k, const char *what) {
    if (k.rows() != k.cols()) {
        throw UsageError(std::string(what) + " is " + std::to_string(k.rows()) + "x" +
                         std::to_string(k.cols()) + ", expected square");
    }
    const double scale = 1.0 + k.cwiseAbs().maxCoeff();
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw UsageError(std::string(what) + " is not symmetric");
    }
}

} // namespace

SvmModel svm_fit(const Eigen::MatrixXd &gram, std::span<const int> labels, double C, double tol) {
    check_symmetric(gram, "Gram matrix");
    const auto n = static_cast<std::size_t>(gram.rows());
    if (labels.size() != n) {
        throw UsageError("Gram matrix has " + std::to_string(n) + " rows for " +
                         std::to_string(labels.size()) + " labels");
    }
    if (!(C > 0.0)) {
        throw ConfigError("C must be positive");
    }
    bool pos = false;
    bool neg = false;
    for (int y : labels) {
        if (y == 1) {
            pos = true;
        } else if (y == -1) {
            neg = true;
        } else {
            throw UsageError("label " + std::to_string(y) + " is not +1 or -1");
        }
    }
    if (!pos || !neg) {
        throw UsageError("SVM training needs both classes");
    }

    std::vector<double> y(labels.begin(), labels.end());
    auto kij = [&](std::size_t i, std::size_t j) {
        return gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };
    auto qij = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * kij(i, j); };

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0); // gradient of 1/2 a^T Q a - e^T a
    auto in_up = [&](std::size_t t) {
        return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
    };
    auto in_low = [&](std::size_t t) {
        return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
    };

    const long long max_iter = 100000LL * static_cast<long long>(n);
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (in_up(t) && -y[t] * grad[t] >= gmax) {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) {
                continue;
            }
            gmax2 = std::max(gmax2, y[t] * grad[t]);
            const double b = gmax + y[t] * grad[t];
            if (i < n && b > 0.0) {
                double a = kij(i, i) + kij(t, t) - 2.0 * kij(i, t);
                if (a <= 0.0) {
                    a = kTau;
                }
                if (-(b * b) / a <= best) {
                    best = -(b * b) / a;
                    j = t;
                }
            }
        }
        if (i == n || j == n || gmax + gmax2 < tol) {
            break;
        }

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = qij(i, i) + qij(j, j) + 2.0 * qij(i, j);
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = qij(i, i) + qij(j, j) - 2.0 * qij(i, j);
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += qij(t, i) * di + qij(t, j) * dj;
        }
    }

    SvmModel model;
    model.alpha = alpha;
    model.labels.assign(labels.begin(), labels.end());
    model.C = C;
    model.iterations = iter;

    // Bias-free decision values f_i = sum_j alpha_j y_j K_ij.
    std::vector<double> f(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            f[i] += alpha[j] * y[j] * kij(i, j);
        }
    }
    double acc = 0.0;
    std::size_t free = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0.0 && alpha[i] < C) {
            acc += y[i] - f[i];
            ++free;
        }
    }
    if (free > 0) {
        model.bias = acc / static_cast<double>(free);
    } else {
        double max_neg = -std::numeric_limits<double>::infinity();
        double min_pos = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (y[i] < 0) {
                max_neg = std::max(max_neg, f[i]);
            } else {
                min_pos = std::min(min_pos, f[i]);
            }
        }
        model.bias = -(max_neg + min_pos) / 2.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0.0) {
            model.support.push_back(i);
        }
        model.train_decisions.push_back(f[i] + model.bias);
    }
    return model;
}

double dual_objective(const SvmModel &model, const Eigen::MatrixXd &gram) {
    const auto n = static_cast<Eigen::Index>(model.alpha.size());
    if (gram.rows() != n || gram.cols() != n) {
        throw UsageError("Gram matrix does not match the model size");
    }
    Eigen::VectorXd ya(n);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        ya(i) = model.alpha[k] * model.labels[k];
        sum += model.alpha[k];
    }
    return sum - 0.5 * ya.dot(gram * ya);
}

double decide(const SvmModel &model, std::span<const double> kernel_row) {
    if (kernel_row.size() != model.alpha.size()) {
        throw UsageError("kernel row has " + std::to_string(kernel_row.size()) +
                         " entries for " + std::to_string(model.alpha.size()) +
                         " training instances");
    }
    double out = model.bias;
    for (std::size_t i = 0; i < kernel_row.size(); ++i) {
        out += model.alpha[i] * model.labels[i] * kernel_row[i];
    }
    return out;
}

std::vector<double> decide_rows(const SvmModel &model, const Eigen::MatrixXd &rows) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(rows.rows()));
    std::vector<double> row(static_cast<std::size_t>(rows.cols()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            row[static_cast<std::size_t>(j)] = rows(i, j);
        }
        out.push_back(decide(model, row));
    }
    return out;
}

int predict_sign(double decision) { return decision >= 0.0 ? 1 : -1; }

int per_time_vote(std::span<const double> decisions, const kernel::KernelWeights &weights) {
    if (decisions.size() != weights.eta.size()) {
        throw UsageError("vote has " + std::to_string(decisions.size()) + " decisions for " +
                         std::to_string(weights.eta.size()) + " weights");
    }
    double total = 0.0;
    for (std::size_t l = 0; l < decisions.size(); ++l) {
        const double s = decisions[l] > 0.0 ? 1.0 : (decisions[l] < 0.0 ? -1.0 : 0.0);
        total += weights.eta[l] * s;
    }
    return total >= 0.0 ? 1 : -1;
}

std::vector<int> per_time_vote(std::span<const SvmModel> models,
                               std::span<const Eigen::MatrixXd> rows,
                               const kernel::KernelWeights &weights) {
    if (models.size() != rows.size() || models.size() != weights.eta.size()) {
        throw UsageError("vote needs one model and one kernel block per weight");
    }
    if (models.empty()) {
        return {};
    }
    const auto m = static_cast<std::size_t>(rows[0].rows());
    std::vector<std::vector<double>> per_slice;
    for (std::size_t l = 0; l < models.size(); ++l) {
        if (static_cast<std::size_t>(rows[l].rows()) != m) {
            throw UsageError("kernel blocks disagree on the number of test rows");
        }
        per_slice.push_back(decide_rows(models[l], rows[l]));
    }
    std::vector<int> out(m);
    std::vector<double> d(models.size());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < models.size(); ++l) {
            d[l] = per_slice[l][i];
        }
        out[i] = per_time_vote(d, weights);
    }
    return out;
}

double roc_auc(std::span<const int> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) {
        throw UsageError("labels and scores differ in length");
    }
    std::vector<double> pos;
    std::vector<double> neg;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        (y_true[i] == 1 ? pos : neg).push_back(scores[i]);
    }
    if (pos.empty() || neg.empty()) {
        throw DegenerateError("AUC is undefined for a single class");
    }
    double concordant = 0.0;
    for (double sp : pos) {
        for (double sn : neg) {
            if (sp > sn) {
                concordant += 1.0;
            } else if (sp == sn) {
                concordant += 0.5;
            }
        }
    }
    return concordant / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

MetricsReport metrics(std::span<const int> y_true, std::span<const int> y_pred,
                      std::span<const double> scores) {
    if (y_true.size() != y_pred.size() || y_true.size() != scores.size()) {
        throw UsageError("labels, predictions and scores differ in length");
    }
    double tp = 0.0;
    double tn = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool truth = y_true[i] == 1;
        const bool pred = y_pred[i] == 1;
        tp += static_cast<double>(truth && pred);
        tn += static_cast<double>(!truth && !pred);
        fp += static_cast<double>(!truth && pred);
        fn += static_cast<double>(truth && !pred);
    }
    MetricsReport r;
    r.roc_auc = roc_auc(y_true, scores);
    r.accuracy = (tp + tn) / static_cast<double>(y_true.size());
    r.f1 = (2.0 * tp + fp + fn) > 0.0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
    r.balanced_accuracy = 0.5 * (tp / (tp + fn) + tn / (tn + fp));
    return r;
}

double kernel_alignment(const Eigen::MatrixXd &k, std::span<const int> row_labels,
                        std::span<const int> col_labels) {
    if (static_cast<std::size_t>(k.rows()) != row_labels.size() ||
        static_cast<std::size_t>(k.cols()) != col_labels.size()) {
        throw UsageError("kernel is " + std::to_string(k.rows()) + "x" +
                         std::to_string(k.cols()) + " for " + std::to_string(row_labels.size()) +
                         " x " + std::to_string(col_labels.size()) + " labels");
    }
    if (k.size() == 0) {
        throw UsageError("alignment of an empty kernel");
    }
    double dev = 0.0;
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            dev += std::abs(k(i, j) - row_labels[static_cast<std::size_t>(i)] *
                                          col_labels[static_cast<std::size_t>(j)]);
        }
    }
    return 1.0 - dev / static_cast<double>(k.size());
}

double kernel_alignment(const Eigen::MatrixXd &k, std::span<const int> labels) {
    return kernel_alignment(k, labels, labels);
}

double min_eigenvalue(const Eigen::MatrixXd &k) {
    check_symmetric(k, "matrix");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

Eigen::MatrixXd tikhonov_regularize(const Eigen::MatrixXd &k) {
    const double eps_min = min_eigenvalue(k);
    if (eps_min >= 0.0) {
        return k;
    }
    Eigen::MatrixXd out = k;
    out.diagonal().array() -= eps_min;
    return out;
}

} // namespace tshk::svm
