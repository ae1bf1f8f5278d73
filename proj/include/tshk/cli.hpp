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
 * Run configuration, the end-to-end pipelines behind each command, and the
 * command dispatcher used by the `tshk` executable.
 *
 * Exit codes: 0 success, 1 runtime or training failure, 2 configuration or
 * input error.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tshk/ansatz.hpp"
#include "tshk/data.hpp"
#include "tshk/kernel.hpp"
#include "tshk/qccnet.hpp"
#include "tshk/svm.hpp"

namespace tshk::cli {

inline constexpr const char *kVersion = "0.1.0";

struct DatasetConfig {
    std::string source{"moons2circles"}; ///< moons2circles | sincos | ucr | csv
    int n_instances{100};                ///< training instances (generators)
    int n_test{100};                     ///< test instances (moons2circles)
    int p{10};
    double noise{0.05};
    std::uint64_t seed{1};
    std::string train_path;
    std::string test_path;
    int decimate{1};
    double time_scale{1.0};
    double scale_lo{0.0};
    double scale_hi{3.14159265358979323846};
};

enum class SvmMode { Combined, Vote };

struct SvmConfig {
    double C{100.0};
    SvmMode mode{SvmMode::Combined};
    std::uint64_t shots{0}; ///< 0 selects exact kernels
    std::uint64_t shot_seed{0};
    bool tikhonov{false};
};

struct ProbeConfig {
    double delta_min{0.0};
    double delta_max{2.0};
    int points{201};
};

struct QmpConfig {
    std::string layout; ///< layout JSON; empty packs a line of `line_width`
    int line_width{127};
    int buffer{1};
    std::uint64_t shots{10000};
    double flip_prob{0.0};
    int slice{0};
    std::uint64_t seed{0};
};

struct RunConfig {
    DatasetConfig dataset;
    ansatz::AnsatzSpec ansatz;
    qccnet::TrainConfig train;
    std::string eval_split{"test"}; ///< split used to rank restarts: test | train
    SvmConfig svm;
    ProbeConfig probe;
    QmpConfig qmp;
    std::string output{"out"};
    int threads{1};
    nlohmann::json source; ///< the document the config was read from
};

/**
 * Parse a config document. Unknown sections or keys, wrong types and
 * out-of-range values raise ConfigError naming the offending location
 * (e.g. "train.lerning_rate").
 */
RunConfig parse_config(const nlohmann::json &doc);
RunConfig load_config(const std::filesystem::path &path);

/// Apply "section.key=value" overrides; the value is parsed as JSON, or
/// taken as a string when it is not valid JSON.
nlohmann::json apply_overrides(nlohmann::json doc, const std::vector<std::string> &overrides);

/// 64-bit FNV-1a of the canonical dump of `doc`, as 16 hex digits.
std::string config_hash(const nlohmann::json &doc);

struct Splits {
    data::Dataset train;
    data::Dataset test;
};

/// Raw (unscaled) train and test sets described by `cfg`.
Splits load_datasets(const DatasetConfig &cfg);

/// Fit the feature scaler on the training split, apply it to both splits and
/// multiply the time grids by cfg.time_scale.
std::pair<Splits, data::Scaler> prepare(const Splits &raw, const DatasetConfig &cfg);

struct EvalOptions {
    double C{100.0};
    SvmMode mode{SvmMode::Combined};
    kernel::EvalMode kernel_mode;
    bool tikhonov{false};
    int threads{1};
};

struct EvalReport {
    svm::MetricsReport metrics;
    std::vector<double> decisions; ///< combined D(x), or sum_l eta_l D_l(x) in vote mode
    std::vector<int> predictions;
    std::vector<int> labels;
    std::vector<svm::SvmModel> models; ///< one (combined) or p (vote)
};

/// Kernel stacks for a trained model on already-scaled data.
struct KernelBlocks {
    kernel::GramStack train;  ///< N x N per slice
    kernel::GramStack cross;  ///< M x N per slice
};

KernelBlocks compute_blocks(const kernel::TrainedTSHK &model, const data::Dataset &train,
                            const data::Dataset &test, const kernel::EvalMode &mode,
                            int threads = 1);

/// SVM fit, prediction and scoring from precomputed kernel blocks.
EvalReport evaluate_blocks(const KernelBlocks &blocks, const kernel::KernelWeights &weights,
                           std::span<const int> y_train, std::span<const int> y_test,
                           const EvalOptions &opts);

/// compute_blocks followed by evaluate_blocks.
EvalReport evaluate_model(const kernel::TrainedTSHK &model, const data::Dataset &train,
                          const data::Dataset &test, const EvalOptions &opts);

struct QmpReport {
    std::size_t trf{0};
    std::size_t active_qubits{0};
    std::size_t circuits{0};
    std::size_t joint_runs{0};
    std::uint64_t serial_calls{0};
    std::uint64_t packed_calls{0};
    double min_fidelity{1.0};          ///< packed vs serial, per circuit
    double mean_fidelity{1.0};
    double min_fidelity_ideal{1.0};    ///< packed vs exact probabilities
    std::size_t ideal_degenerate{0};   ///< circuits with a uniform exact distribution
    double max_gram_difference{0.0};   ///< |K_serial - K_packed| over the slice
    bool counts_identical{true};
    Eigen::MatrixXd gram_serial;
    Eigen::MatrixXd gram_packed;
    std::vector<double> fidelities;
};

/**
 * Evaluate training Gram slice `cfg.slice` circuit by circuit (serial) and
 * packed `trf` circuits per joint run on `layout`, with shared per-circuit
 * seeds, and account QPU calls for the full train and test kernels. The
 * layout is read from cfg.layout, or packed greedily on a line.
 */
QmpReport qmp_experiment(const kernel::TrainedTSHK &model, const data::Dataset &train,
                         std::size_t n_test, const QmpConfig &cfg, int threads = 1);

struct CommandOptions {
    std::string command;
    std::optional<std::filesystem::path> model_path;
    std::optional<std::filesystem::path> output;
};

/// Run one of generate | train | eval | probe | qmp. Returns the exit code
/// and reports errors on stderr.
int run_command(const RunConfig &config, const CommandOptions &opts);

} // namespace tshk::cli
