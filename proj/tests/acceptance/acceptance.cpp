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


// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   tshk_acceptance --suite properties    criteria 1-8
//   tshk_acceptance --suite experiments   criteria 9-14
//   tshk_acceptance --suite all

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "support.hpp"
#include "tshk/ansatz.hpp"
#include "tshk/cli.hpp"
#include "tshk/kernel.hpp"
#include "tshk/qccnet.hpp"
#include "tshk/qmp.hpp"
#include "tshk/svm.hpp"
#include "tshk/timeprobe.hpp"

using namespace tshk;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

class Checker {
  public:
    void fail(const std::string &what) {
        if (failures_ == 0) {
            first_ = what;
        }
        ++failures_;
    }
    void expect(bool ok, const std::string &what) {
        if (!ok) {
            fail(what);
        }
    }
    [[nodiscard]] bool ok() const { return failures_ == 0; }
    [[nodiscard]] std::string summary(const std::string &stats) const {
        if (ok()) {
            return stats;
        }
        return stats + "; " + std::to_string(failures_) + " violation(s), first: " + first_;
    }

  private:
    int failures_{0};
    std::string first_;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string fmt_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------- properties

Outcome kernel_validity() {
    Rng rng(1001);
    Checker c;
    double worst_sym = 0;
    double worst_diag = 0;
    double worst_hi = 0;
    double worst_lo = 0;
    for (int k = 0; k < 200; ++k) {
        const auto spec = testing_support::random_spec(rng, 4);
        const auto theta = ansatz::ParameterSet::random(spec, rng);
        const auto d = static_cast<std::size_t>(spec.n_features);
        const auto x = testing_support::random_vector(rng, d, 0, pi);
        const auto xp = testing_support::random_vector(rng, d, 0, pi);
        const double t = uniform(rng, 0, 3);
        const auto exact = kernel::EvalMode::exact();
        const double a = kernel::kappa_t(spec, theta, x, xp, t, exact);
        const double b = kernel::kappa_t(spec, theta, xp, x, t, exact);
        const double self = kernel::kappa_t(spec, theta, x, x, t, exact);
        worst_sym = std::max(worst_sym, std::abs(a - b));
        worst_diag = std::max(worst_diag, std::abs(self - 1));
        worst_hi = std::max(worst_hi, a - 1);
        worst_lo = std::min(worst_lo, a);
        c.expect(std::abs(a - b) <= 1e-12, "symmetry at draw " + std::to_string(k));
        c.expect(std::abs(self - 1) <= 1e-12, "self overlap at draw " + std::to_string(k));
        c.expect(a >= 0 && a <= 1 + 1e-12, "range at draw " + std::to_string(k));
    }
    return {c.ok(), c.summary("200 draws; max |k(x,x')-k(x',x)| " + fmt(worst_sym) +
                              ", max |k(x,x)-1| " + fmt(worst_diag) + ", min " + fmt(worst_lo) +
                              ", max excess " + fmt(worst_hi))};
}

Outcome gram_psd() {
    Rng rng(1002);
    Checker c;
    double worst = 1e300;
    double worst_reg = 1e300;
    int mats = 0;
    for (int k = 0; k < 12; ++k) {
        const auto spec = testing_support::random_spec(rng, 3);
        const auto theta = ansatz::ParameterSet::random(spec, rng);
        const int n = 5 + static_cast<int>(uniform_index(rng, 16));
        const int p = 1 + static_cast<int>(uniform_index(rng, 3));
        const auto insts = testing_support::random_instances(rng, n, p, spec.n_features);
        const auto times = testing_support::time_grid(p);
        const auto stack = kernel::gram_stack(spec, theta, insts, times, kernel::EvalMode::exact());
        std::vector<double> raw;
        for (int l = 0; l < p; ++l) {
            raw.push_back(uniform01(rng) + 0.01);
        }
        auto all = stack.mats;
        all.push_back(kernel::combined_kernel(stack, kernel::KernelWeights::normalized(raw)));
        for (const auto &m : all) {
            const double e = svm::min_eigenvalue(m);
            worst = std::min(worst, e);
            c.expect(e >= -1e-9, "exact Gram eigenvalue " + fmt(e));
            const double er = svm::min_eigenvalue(svm::tikhonov_regularize(m));
            worst_reg = std::min(worst_reg, er);
            c.expect(er >= -1e-12, "regularized eigenvalue " + fmt(er));
            ++mats;
        }
    }
    // indefinite symmetric matrices, including shot-noise Grams
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 19));
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                m(i, j) = m(j, i) = uniform(rng, -1, 1);
            }
        }
        const double er = svm::min_eigenvalue(svm::tikhonov_regularize(m));
        worst_reg = std::min(worst_reg, er);
        c.expect(er >= -1e-12, "regularized eigenvalue " + fmt(er));
        ++mats;
    }
    for (int k = 0; k < 5; ++k) {
        const auto spec = testing_support::random_spec(rng, 3);
        const auto theta = ansatz::ParameterSet::random(spec, rng);
        const auto insts = testing_support::random_instances(rng, 15, 1, spec.n_features);
        const auto stack = kernel::gram_stack(spec, theta, insts, testing_support::time_grid(1),
                                              kernel::EvalMode::sampled(50, 77 + k));
        const double er = svm::min_eigenvalue(svm::tikhonov_regularize(stack.mats[0]));
        worst_reg = std::min(worst_reg, er);
        c.expect(er >= -1e-12, "regularized shot Gram eigenvalue " + fmt(er));
        ++mats;
    }
    return {c.ok(), c.summary(std::to_string(mats) + " matrices; min exact eigenvalue " +
                              fmt(worst) + ", min regularized eigenvalue " + fmt(worst_reg))};
}

Outcome weight_simplex() {
    Rng rng(1003);
    Checker c;
    double worst_sum = 0;
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 9));
        const int p = 1 + static_cast<int>(uniform_index(rng, 10));
        std::vector<int> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            y[static_cast<std::size_t>(i)] = i == 0 ? 1 : (i == 1 ? -1 : (uniform01(rng) < 0.5 ? 1 : -1));
        }
        kernel::GramStack stack;
        for (int l = 0; l < p; ++l) {
            stack.times.push_back(l);
            stack.mats.push_back(oracle::random_psd(n, rng));
        }
        Eigen::VectorXd phi(n);
        double pos = 0;
        double neg = 0;
        for (int i = 0; i < n; ++i) {
            phi(i) = uniform01(rng);
            (y[static_cast<std::size_t>(i)] > 0 ? pos : neg) += phi(i);
        }
        for (int i = 0; i < n; ++i) {
            phi(i) /= y[static_cast<std::size_t>(i)] > 0 ? pos : neg;
        }
        const auto w = qccnet::extract_weights(stack, y, phi);
        double sum = 0;
        for (double e : w.eta) {
            c.expect(e >= 0, "negative weight " + fmt(e));
            sum += e;
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1));
        c.expect(std::abs(sum - 1) <= 1e-12, "weights sum to " + fmt(sum));
    }
    return {c.ok(), c.summary("100 triples; max |sum(eta)-1| " + fmt(worst_sum))};
}

Outcome gradient_checks() {
    Rng rng(1004);
    Checker c;
    double worst_shift = 0;
    const double h = 1e-6;
    for (int k = 0; k < 50; ++k) {
        const auto spec = testing_support::random_spec(rng, 4);
        const auto theta = ansatz::ParameterSet::random(spec, rng);
        const auto d = static_cast<std::size_t>(spec.n_features);
        const auto x = testing_support::random_vector(rng, d, 0, pi);
        const auto xp = testing_support::random_vector(rng, d, 0, pi);
        const double t = uniform(rng, 0, 2);
        const auto flat = theta.flat();
        const auto param = static_cast<int>(uniform_index(rng, flat.size()));
        const auto prog = ansatz::build_kernel_circuit(spec, x, xp, theta, t);
        const double g = ansatz::shift_rule_derivative(prog, spec.n_qubits, param, flat.size());
        auto eval = [&](double delta) {
            auto f = flat;
            f[static_cast<std::size_t>(param)] += delta;
            const auto th = ansatz::ParameterSet::from_flat(spec, f);
            return sim::prob_all_zeros(
                sim::run(ansatz::build_kernel_circuit(spec, x, xp, th, t), spec.n_qubits));
        };
        const double fd = (eval(h) - eval(-h)) / (2 * h);
        const double err = std::abs(g - fd);
        // relative 1e-5, absolute 1e-8 where the derivative vanishes
        const bool ok = err <= std::max(1e-5 * std::abs(fd), 1e-8);
        if (std::abs(fd) > 1e-8) {
            worst_shift = std::max(worst_shift, err / std::abs(fd));
        }
        c.expect(ok, "shift rule case " + std::to_string(k) + " err " + fmt(err));
    }

    double worst_env = 0;
    const double he = 1e-4;
    for (int k = 0; k < 20; ++k) {
        ansatz::AnsatzSpec spec;
        spec.n_qubits = 2;
        spec.n_features = 1 + static_cast<int>(uniform_index(rng, 2));
        spec.embed_layers = 1;
        spec.sel_layers = 1 + static_cast<int>(uniform_index(rng, 2));
        spec.walsh_locality = 2;
        const auto theta = ansatz::ParameterSet::random(spec, rng);
        const auto batch = testing_support::random_instances(rng, 4, 2, spec.n_features);
        const std::vector<int> y{1, -1, 1, -1};
        const std::vector<double> times{uniform(rng, 0.1, 0.6), uniform(rng, 0.6, 1.5)};
        const double lambda = 0.1;
        auto loss_at = [&](const std::vector<double> &f) {
            const auto th = ansatz::ParameterSet::from_flat(spec, f);
            const auto s = kernel::gram_stack(spec, th, batch, times, kernel::EvalMode::exact());
            return qccnet::solve_inner({kernel::sum_slices(s), y, lambda}, 1e-10).loss_value;
        };
        const auto stack = kernel::gram_stack(spec, theta, batch, times, kernel::EvalMode::exact());
        const auto sol = qccnet::solve_inner({kernel::sum_slices(stack), y, lambda}, 1e-10);
        const auto grad = qccnet::outer_gradient(spec, theta, batch, times, sol.phi, lambda);
        const auto flat = theta.flat();
        for (std::size_t j = 0; j < flat.size(); ++j) {
            auto up = flat;
            auto down = flat;
            up[j] += he;
            down[j] -= he;
            const double fd = (loss_at(up) - loss_at(down)) / (2 * he);
            const double err = std::abs(grad[j] - fd);
            if (std::abs(fd) > 1e-8) {
                worst_env = std::max(worst_env, err / std::abs(fd));
            }
            c.expect(err <= std::max(1e-3 * std::abs(fd), 1e-8),
                     "envelope case " + std::to_string(k) + " entry " + std::to_string(j) +
                         " err " + fmt(err) + " fd " + fmt(fd));
        }
    }
    return {c.ok(), c.summary("50 shift-rule cases, max rel err " + fmt(worst_shift) +
                              "; 20 envelope cases, max rel err " + fmt(worst_env))};
}

// min phi^T Q phi over two points per class by a dense grid on both segments
double grid_min_2x2(const Eigen::MatrixXd &q, const std::vector<int> &y, int steps) {
    std::vector<int> pos;
    std::vector<int> neg;
    for (int i = 0; i < 4; ++i) {
        (y[static_cast<std::size_t>(i)] > 0 ? pos : neg).push_back(i);
    }
    double best = 1e300;
    Eigen::Vector4d phi;
    for (int a = 0; a <= steps; ++a) {
        for (int b = 0; b <= steps; ++b) {
            const double u = static_cast<double>(a) / steps;
            const double v = static_cast<double>(b) / steps;
            phi(pos[0]) = u;
            phi(pos[1]) = 1 - u;
            phi(neg[0]) = v;
            phi(neg[1]) = 1 - v;
            best = std::min(best, phi.dot(q * phi));
        }
    }
    return best;
}

Outcome inner_solver() {
    Rng rng(1005);
    Checker c;
    double worst = 0;
    double worst_grid = 0;
    double worst_feas = 0;
    int cases = 0;
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 5));
        std::vector<int> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            y[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1 : -1;
        }
        if (n >= 4 && uniform01(rng) < 0.3) {
            y[1] = 1;
        }
        const auto kmat = oracle::random_psd(n, rng);
        const double lambda = uniform(rng, 0.01, 1.0);
        const qccnet::KomdProblem prob{kmat, y, lambda};
        const auto sol = qccnet::solve_inner(prob);
        Eigen::MatrixXd q = kmat;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                q(i, j) *= (1 - lambda) * y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
            }
            q(i, i) += lambda;
        }
        const double ref = oracle::komd_min(q, y);
        worst = std::max(worst, std::abs(sol.loss_value - ref));
        c.expect(std::abs(sol.loss_value - ref) <= 1e-4,
                 "case " + std::to_string(k) + " loss " + fmt(sol.loss_value) + " vs " + fmt(ref));
        if (n == 4 && std::count(y.begin(), y.end(), 1) == 2) {
            const double g = grid_min_2x2(q, y, 2000);
            worst_grid = std::max(worst_grid, std::abs(sol.loss_value - g));
            c.expect(std::abs(sol.loss_value - g) <= 1e-4, "grid case " + std::to_string(k));
        }
        double pos = 0;
        double neg = 0;
        for (int i = 0; i < n; ++i) {
            worst_feas = std::max(worst_feas, -sol.phi(i));
            (y[static_cast<std::size_t>(i)] > 0 ? pos : neg) += sol.phi(i);
        }
        worst_feas = std::max({worst_feas, std::abs(pos - 1), std::abs(neg - 1)});
        c.expect(sol.phi.minCoeff() >= -1e-8 && std::abs(pos - 1) <= 1e-8 && std::abs(neg - 1) <= 1e-8,
                 "feasibility case " + std::to_string(k));
        ++cases;
    }
    return {c.ok(), c.summary(std::to_string(cases) + " problems (N<=6); max |loss-oracle| " +
                              fmt(worst) + ", max |loss-grid| " + fmt(worst_grid) +
                              ", max constraint violation " + fmt(worst_feas))};
}

Outcome time_probe() {
    Rng rng(1006);
    Checker c;
    double worst_zero = 0;
    double worst = 0;
    for (int k = 0; k < 40; ++k) {
        const auto spec = testing_support::random_spec(rng, 3);
        const auto theta = ansatz::ParameterSet::random(spec, rng);
        const auto deltas = timeprobe::linspace(0, 4, 21);
        const auto v = timeprobe::overlap(spec, theta, deltas);
        worst_zero = std::max(worst_zero, std::abs(v[0] - 1));
        c.expect(std::abs(v[0] - 1) <= 1e-12, "F(0) = " + fmt(v[0]));
        for (std::size_t j = 0; j < deltas.size(); ++j) {
            const double ref = oracle::probe_overlap(spec.n_qubits, spec.sel_layers, theta.beta,
                                                     theta.gamma, spec.walsh_locality, deltas[j]);
            worst = std::max(worst, std::abs(v[j] - ref));
            c.expect(std::abs(v[j] - ref) <= 1e-10, "oracle mismatch " + fmt(std::abs(v[j] - ref)));
        }
    }
    return {c.ok(), c.summary("40 random (beta, gamma), n<=3; max |F(0)-1| " + fmt(worst_zero) +
                              ", max |F-oracle| " + fmt(worst))};
}

Outcome qmp_round_trip() {
    Rng rng(1007);
    Checker c;
    int windows = 0;
    for (int k = 0; k < 20; ++k) {
        const int width = 2 + static_cast<int>(uniform_index(rng, 2));
        const auto layout = qmp::pack(width, qmp::Device::line(40), 1);
        std::vector<sim::Program> circuits;
        for (std::size_t j = 0; j < qmp::trf(layout); ++j) {
            circuits.push_back(testing_support::random_program(rng, width, 10));
        }
        const std::uint64_t seed = rng();
        const std::uint64_t shots = 1000 + uniform_index(rng, 4000);
        const auto joint = qmp::run_packed(layout, circuits, width, shots, seed, 0.0, 1 + k % 2);
        std::uint64_t joint_total = 0;
        for (const auto &kv : joint.counts) {
            joint_total += kv.second;
        }
        c.expect(joint_total == shots, "joint count conservation");
        for (const auto &a : layout.assignments) {
            const auto part = qmp::partial_measurement(joint, a.qubits, false);
            const auto serial = qmp::run_serial(circuits[a.circuit], width, shots, seed, a.circuit);
            c.expect(part.counts == serial.counts, "packed marginal differs from serial run");
            std::uint64_t tot = 0;
            for (const auto &kv : part.counts) {
                tot += kv.second;
            }
            c.expect(tot == shots, "marginal count conservation");
            ++windows;
        }
        for (int least = 0; least + 3 <= layout.device_width(); least += 5) {
            std::uint64_t tot = 0;
            for (const auto &kv : qmp::partial_measurement(joint, least, 3).counts) {
                tot += kv.second;
            }
            c.expect(tot == shots, "window count conservation");
        }
    }
    int identities = 0;
    for (int k = 0; k < 100; ++k) {
        const int bits = 1 + static_cast<int>(uniform_index(rng, 4));
        const auto n = std::uint64_t{1} << bits;
        qmp::Distribution p;
        qmp::Distribution uni;
        double sum = 0;
        for (std::uint64_t j = 0; j < n; ++j) {
            const auto key = sim::to_bitstring(j, bits);
            uni[key] = 1.0 / static_cast<double>(n);
            if (j == 0 || uniform01(rng) < 0.7) {
                p[key] = uniform01(rng) + 0.05;
                sum += p[key];
            }
        }
        for (auto &kv : p) {
            kv.second /= sum;
        }
        if (p.size() == n) {
            p.begin()->second += 0.5;
            double s = 0;
            for (const auto &kv : p) {
                s += kv.second;
            }
            for (auto &kv : p) {
                kv.second /= s;
            }
        }
        c.expect(qmp::result_fidelity(p, p, n) == 1.0, "F(P,P) != 1");
        c.expect(qmp::result_fidelity(uni, p, n) == 0.0, "F(uniform,P) != 0");
        ++identities;
    }
    const double third = qmp::result_fidelity({{"00", 0.5}, {"11", 0.5}}, {{"00", 1.0}}, 4);
    c.expect(std::abs(third - 1.0 / 3.0) <= 1e-12, "1/3 example gives " + fmt(third));
    return {c.ok(), c.summary(std::to_string(windows) + " windows identical to serial runs; " +
                              std::to_string(identities) +
                              " fidelity identity checks; 1/3 example error " +
                              fmt(std::abs(third - 1.0 / 3.0)))};
}

Outcome svm_checks() {
    Checker c;
    const auto two = svm::svm_fit(Eigen::MatrixXd::Identity(2, 2), std::vector<int>{1, -1}, 100.0);
    c.expect(two.alpha[0] == 1.0 && two.alpha[1] == 1.0 && two.bias == 0.0,
             "two-point solution alpha (" + fmt(two.alpha[0]) + ", " + fmt(two.alpha[1]) +
                 "), b " + fmt(two.bias));
    Rng rng(1008);
    double worst = 0;
    for (int k = 0; k < 60; ++k) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 5));
        std::vector<int> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            y[static_cast<std::size_t>(i)] = i == 0 ? 1 : (i == 1 ? -1 : (uniform01(rng) < 0.5 ? 1 : -1));
        }
        const Eigen::MatrixXd kmat = oracle::random_psd(n, rng) + 1e-3 * Eigen::MatrixXd::Identity(n, n);
        const double cc = k % 2 == 0 ? 100.0 : uniform(rng, 0.05, 2.0);
        const auto m = svm::svm_fit(kmat, y, cc);
        const double ref = oracle::svm_dual_max(kmat, y, cc);
        worst = std::max(worst, std::abs(svm::dual_objective(m, kmat) - ref));
        c.expect(std::abs(svm::dual_objective(m, kmat) - ref) <= 1e-5, "dual gap case " + std::to_string(k));
    }
    const double auc = svm::roc_auc(std::vector<int>{1, 1, -1, -1}, std::vector<double>{0.9, 0.2, 0.8, 0.1});
    c.expect(auc == 0.75, "AUC example gives " + fmt(auc));
    return {c.ok(), c.summary("alpha=(1,1), b=0 exact; 60 dual problems (N<=6), max gap " +
                              fmt(worst) + "; AUC example " + fmt(auc))};
}

// --------------------------------------------------------------- experiments

struct Trained {
    cli::RunConfig cfg;
    cli::Splits data;
    kernel::TrainedTSHK model;
    double seconds{0};
};

fs::path resolve(const std::string &p) {
    const fs::path path(p);
    return path.is_absolute() ? path : fs::path(TSHK_SOURCE_DIR) / path;
}

cli::RunConfig load_repo_config(const std::string &name, int threads) {
    auto cfg = cli::load_config(resolve("configs/" + name));
    if (!cfg.dataset.train_path.empty()) {
        cfg.dataset.train_path = resolve(cfg.dataset.train_path).string();
        cfg.dataset.test_path = resolve(cfg.dataset.test_path).string();
    }
    if (!cfg.qmp.layout.empty()) {
        cfg.qmp.layout = resolve(cfg.qmp.layout).string();
    }
    cfg.threads = threads;
    cfg.train.threads = threads;
    return cfg;
}

Trained train_from(cli::RunConfig cfg) {
    const auto start = std::chrono::steady_clock::now();
    Trained out;
    const auto raw = cli::load_datasets(cfg.dataset);
    auto [data, scaler] = cli::prepare(raw, cfg.dataset);
    auto spec = cfg.ansatz;
    if (spec.n_features == 0) {
        spec.n_features = data.train.d;
    }
    const auto &eval = cfg.eval_split == "test" ? data.test : data.train;
    auto result = qccnet::train(data.train, eval, spec, cfg.train);
    result.model.scaling = scaler;
    out.model = result.model;
    out.data = std::move(data);
    out.cfg = std::move(cfg);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

cli::EvalOptions eval_options(const cli::RunConfig &cfg) {
    cli::EvalOptions eo;
    eo.C = cfg.svm.C;
    eo.mode = cfg.svm.mode;
    eo.tikhonov = cfg.svm.tikhonov;
    eo.threads = cfg.threads;
    eo.kernel_mode = kernel::EvalMode::exact();
    return eo;
}

std::string metric_line(const svm::MetricsReport &m) {
    return "accuracy " + fmt_fixed(m.accuracy) + ", F1 " + fmt_fixed(m.f1) + ", A_B " +
           fmt_fixed(m.balanced_accuracy) + ", AUC " + fmt_fixed(m.roc_auc);
}

/// Local maxima of eta (endpoints count when above their single neighbour),
/// largest first.
std::vector<std::size_t> local_maxima(const std::vector<double> &eta) {
    std::vector<std::size_t> peaks;
    const std::size_t p = eta.size();
    for (std::size_t l = 0; l < p; ++l) {
        const bool left = l == 0 || eta[l] > eta[l - 1];
        const bool right = l + 1 == p || eta[l] >= eta[l + 1];
        if (left && right && p > 1) {
            peaks.push_back(l);
        }
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return eta[a] > eta[b]; });
    return peaks;
}

struct Report {
    int failed{0};
    void line(int id, const std::string &name, const Outcome &o) {
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << "  " << name << ": "
                  << o.detail << std::endl;
        failed += o.pass ? 0 : 1;
    }
    void guarded(int id, const std::string &name, const std::function<Outcome()> &fn) {
        try {
            line(id, name, fn());
        } catch (const std::exception &e) {
            line(id, name, {false, std::string("exception: ") + e.what()});
        }
    }
};

void run_properties(Report &r) {
    const auto start = std::chrono::steady_clock::now();
    r.guarded(1, "kernel validity", kernel_validity);
    r.guarded(2, "Gram PSD and regularization", gram_psd);
    r.guarded(3, "weight simplex", weight_simplex);
    r.guarded(4, "gradient checks", gradient_checks);
    r.guarded(5, "inner solver", inner_solver);
    r.guarded(6, "time probe", time_probe);
    r.guarded(7, "QMP round trip and fidelity", qmp_round_trip);
    r.guarded(8, "SVM", svm_checks);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "property suite wall time " << fmt_fixed(secs) << " s (budget 120 s)" << std::endl;
    if (secs > 120.0) {
        std::cout << "FAIL  property suite exceeded its 120 s budget" << std::endl;
        ++r.failed;
    }
}

void run_experiments(Report &r, int threads) {
    // 9 and 10: moons2circles with and without time dependence
    double full_accuracy = -1;
    r.guarded(9, "moons2circles accuracy", [&]() -> Outcome {
        const auto t = train_from(load_repo_config("moons2circles.json", threads));
        const auto rep = cli::evaluate_model(t.model, t.data.train, t.data.test, eval_options(t.cfg));
        full_accuracy = rep.metrics.accuracy;
        return {rep.metrics.accuracy >= 0.98,
                metric_line(rep.metrics) + " (threshold >= 0.98; " + t.model.spec.name() +
                    ", best of " + std::to_string(t.cfg.train.restarts) + ", " +
                    fmt_fixed(t.seconds) + " s)"};
    });
    r.guarded(10, "time-independence ablation", [&]() -> Outcome {
        auto cfg = load_repo_config("moons2circles.json", threads);
        cfg.train.fixed_evolution_time = 1.0;
        const auto t = train_from(cfg);
        const auto rep = cli::evaluate_model(t.model, t.data.train, t.data.test, eval_options(t.cfg));
        const double acc = rep.metrics.accuracy;
        const bool ok = acc <= 0.90 && full_accuracy >= 0 && acc < full_accuracy;
        return {ok, "accuracy " + fmt_fixed(acc) + " with t fixed at 1 vs " +
                        fmt_fixed(full_accuracy) + " time-dependent (requires <= 0.90 and strictly lower)"};
    });

    // 11 to 14 share one gun-point model
    std::optional<Trained> gp;
    auto gunpoint = [&]() -> Trained & {
        if (!gp) {
            gp = train_from(load_repo_config("gunpoint.json", threads));
        }
        return *gp;
    };
    std::optional<cli::KernelBlocks> blocks;
    auto gp_blocks = [&]() -> cli::KernelBlocks & {
        if (!blocks) {
            auto &t = gunpoint();
            blocks = cli::compute_blocks(t.model, t.data.train, t.data.test, kernel::EvalMode::exact(), threads);
        }
        return *blocks;
    };
    r.guarded(11, "gun-point balanced accuracy", [&]() -> Outcome {
        auto &t = gunpoint();
        const auto rep = cli::evaluate_blocks(gp_blocks(), t.model.weights, t.data.train.labels(),
                                              t.data.test.labels(), eval_options(t.cfg));
        return {rep.metrics.balanced_accuracy >= 0.90,
                metric_line(rep.metrics) + " (threshold A_B >= 0.90; p=" +
                    std::to_string(t.data.train.p()) + ", best of " +
                    std::to_string(t.cfg.train.restarts) + ", " + fmt_fixed(t.seconds) + " s)"};
    });
    r.guarded(12, "gun-point weight profile", [&]() -> Outcome {
        const auto &eta = gunpoint().model.weights.eta;
        const auto peaks = local_maxima(eta);
        if (peaks.size() < 2) {
            return {false, "fewer than two local maxima"};
        }
        const double last = static_cast<double>(eta.size() - 1);
        auto excluded = [&](std::size_t l) {
            const double u = static_cast<double>(l) / last;
            return u < 0.1 || (u >= 0.45 && u <= 0.55) || u > 0.9;
        };
        std::ostringstream d;
        bool ok = true;
        for (int k = 0; k < 2; ++k) {
            const auto l = peaks[static_cast<std::size_t>(k)];
            ok = ok && !excluded(l);
            d << (k == 0 ? "" : ", ") << "peak at slice " << l << " (position "
              << fmt_fixed(static_cast<double>(l) / last) << ", eta " << fmt(eta[l]) << ")";
        }
        d << "; excluded deciles [0, 0.1), [0.45, 0.55], (0.9, 1]";
        return {ok, d.str()};
    });
    r.guarded(13, "QMP accounting and fidelity", [&]() -> Outcome {
        auto &t = gunpoint();
        const auto rep = cli::qmp_experiment(t.model, t.data.train, t.data.test.size(), t.cfg.qmp, threads);
        const bool ok = rep.serial_calls == 436250 && rep.packed_calls == 12465 && rep.trf == 35 &&
                        rep.min_fidelity >= 0.999;
        return {ok, "serial " + std::to_string(rep.serial_calls) + ", packed " +
                        std::to_string(rep.packed_calls) + ", TRF " + std::to_string(rep.trf) +
                        ", " + std::to_string(rep.circuits) + " circuits in " +
                        std::to_string(rep.joint_runs) + " joint runs at " +
                        std::to_string(t.cfg.qmp.shots) + " shots; min packed-vs-serial fidelity " +
                        fmt_fixed(rep.min_fidelity) + " (>= 0.999); min fidelity vs exact " +
                        fmt_fixed(rep.min_fidelity_ideal)};
    });
    r.guarded(14, "Tikhonov rescue", [&]() -> Outcome {
        auto &t = gunpoint();
        auto noisy = gp_blocks();
        Rng rng(derive_seed(20260501, {14}));
        for (auto &m : noisy.train.mats) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                for (Eigen::Index j = i; j < m.cols(); ++j) {
                    const double e = 0.05 * standard_normal(rng);
                    m(i, j) += e;
                    if (j != i) {
                        m(j, i) += e;
                    }
                }
            }
        }
        for (auto &m : noisy.cross.mats) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    m(i, j) += 0.05 * standard_normal(rng);
                }
            }
        }
        auto scores = [&](cli::SvmMode mode, bool tikhonov) {
            auto opts = eval_options(t.cfg);
            opts.mode = mode;
            opts.tikhonov = tikhonov;
            return cli::evaluate_blocks(noisy, t.model.weights, t.data.train.labels(),
                                        t.data.test.labels(), opts)
                .metrics;
        };
        auto no_worse = [](const svm::MetricsReport &reg, const svm::MetricsReport &plain) {
            return reg.accuracy >= plain.accuracy && reg.f1 >= plain.f1 &&
                   reg.balanced_accuracy >= plain.balanced_accuracy && reg.roc_auc >= plain.roc_auc;
        };
        // verdict on the configured pipeline
        const auto a = scores(t.cfg.svm.mode, false);
        const auto b = scores(t.cfg.svm.mode, true);
        const double eps = svm::min_eigenvalue(kernel::combined_kernel(noisy.train, t.model.weights));
        double eps_slice = 1e300;
        for (const auto &m : noisy.train.mats) {
            eps_slice = std::min(eps_slice, svm::min_eigenvalue(m));
        }
        std::string detail = "noisy combined min eigenvalue " + fmt(eps) +
                             ", min slice eigenvalue " + fmt(eps_slice) + "; unregularized " +
                             metric_line(a) + "; regularized " + metric_line(b);
        // per-slice voting sees the indefinite slices directly; reported only
        const auto other = t.cfg.svm.mode == cli::SvmMode::Vote ? cli::SvmMode::Combined : cli::SvmMode::Vote;
        const auto va = scores(other, false);
        const auto vb = scores(other, true);
        detail += std::string("; other mode (") + (other == cli::SvmMode::Vote ? "vote" : "combined") +
                  ", informational) " + metric_line(va) + " -> " + metric_line(vb) +
                  (no_worse(vb, va) ? "" : " [worse]");
        return {no_worse(b, a), detail};
    });
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Acceptance criteria runner"};
    std::string suite = "all";
    int threads = 1;
    app.add_option("--suite", suite, "properties | experiments | all")
        ->check(CLI::IsMember({"properties", "experiments", "all"}));
    app.add_option("--threads", threads, "worker threads for the experiments")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    Report report;
    if (suite == "properties" || suite == "all") {
        run_properties(report);
    }
    if (suite == "experiments" || suite == "all") {
        run_experiments(report, threads);
    }
    std::cout << (report.failed == 0 ? "all criteria passed" : std::to_string(report.failed) + " criterion line(s) failed")
              << std::endl;
    return report.failed == 0 ? 0 : 1;
}
