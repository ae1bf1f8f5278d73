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
 * JSON conversions for specs, parameters, trained models and reports.
 */
#pragma once

#include <filesystem>

#include <json.hpp>

#include "tshk/ansatz.hpp"
#include "tshk/data.hpp"
#include "tshk/kernel.hpp"
#include "tshk/qccnet.hpp"
#include "tshk/svm.hpp"

namespace tshk::ansatz {
void to_json(nlohmann::json &j, const AnsatzSpec &spec);
void from_json(const nlohmann::json &j, AnsatzSpec &spec);
void to_json(nlohmann::json &j, const ParameterSet &theta);
void from_json(const nlohmann::json &j, ParameterSet &theta);
} // namespace tshk::ansatz

namespace tshk::data {
void to_json(nlohmann::json &j, const Scaler &s);
void from_json(const nlohmann::json &j, Scaler &s);
} // namespace tshk::data

namespace tshk::kernel {
void to_json(nlohmann::json &j, const TrainedTSHK &m);
void from_json(const nlohmann::json &j, TrainedTSHK &m);
} // namespace tshk::kernel

namespace tshk::svm {
void to_json(nlohmann::json &j, const SvmModel &m);
void to_json(nlohmann::json &j, const MetricsReport &r);
} // namespace tshk::svm

namespace tshk::qccnet {
void to_json(nlohmann::json &j, const TrainConfig &c);
} // namespace tshk::qccnet

namespace tshk {

/// Write a trained model document. Throws IngestionError on I/O failure.
void save_model(const kernel::TrainedTSHK &model, const std::filesystem::path &path);

/// Read a trained model document. Throws ConfigError if it is malformed.
kernel::TrainedTSHK load_model(const std::filesystem::path &path);

/// Pretty-print `doc` to `path`.
void write_json(const nlohmann::json &doc, const std::filesystem::path &path);

} // namespace tshk
