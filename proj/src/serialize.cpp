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
#include "tshk/serialize.hpp"

#include <fstream>

#include "tshk/error.hpp"

namespace tshk::ansatz {

void to_json(nlohmann::json &j, const AnsatzSpec &spec) {
    j = {{"n_qubits", spec.n_qubits},
         {"n_features", spec.n_features},
         {"embedding", spec.embedding == Embedding::Qaoa ? "qaoa" : "ry"},
         {"embed_layers", spec.embed_layers},
         {"sel_layers", spec.sel_layers},
         {"walsh_locality", spec.walsh_locality}};
}

void from_json(const nlohmann::json &j, AnsatzSpec &spec) {
    spec.n_qubits = j.at("n_qubits").get<int>();
    spec.n_features = j.at("n_features").get<int>();
    const auto emb = j.at("embedding").get<std::string>();
    if (emb == "qaoa") {
        spec.embedding = Embedding::Qaoa;
    } else if (emb == "ry") {
        spec.embedding = Embedding::RyFixed;
    } else {
        throw ConfigError("unknown embedding '" + emb + "'");
    }
    spec.embed_layers = j.at("embed_layers").get<int>();
    spec.sel_layers = j.at("sel_layers").get<int>();
    spec.walsh_locality = j.at("walsh_locality").get<int>();
}

void to_json(nlohmann::json &j, const ParameterSet &theta) {
    j = {{"alpha", theta.alpha}, {"beta", theta.beta}, {"gamma", theta.gamma}};
}

void from_json(const nlohmann::json &j, ParameterSet &theta) {
    theta.alpha = j.at("alpha").get<std::vector<double>>();
    theta.beta = j.at("beta").get<std::vector<double>>();
    theta.gamma = j.at("gamma").get<std::vector<double>>();
}

} // namespace tshk::ansatz

namespace tshk::data {

void to_json(nlohmann::json &j, const Scaler &s) {
    j = {{"scale", s.scale}, {"offset", s.offset}, {"degenerate_dims", s.degenerate_dims}};
}

void from_json(const nlohmann::json &j, Scaler &s) {
    s.scale = j.at("scale").get<std::vector<double>>();
    s.offset = j.at("offset").get<std::vector<double>>();
    s.degenerate_dims = j.value("degenerate_dims", std::vector<int>{});
}

} // namespace tshk::data

namespace tshk::kernel {

void to_json(nlohmann::json &j, const TrainedTSHK &m) {
    j = {{"spec", m.spec},
         {"theta", m.theta},
         {"eta", m.weights.eta},
         {"times", m.times},
         {"fixed_evolution_time", nullptr},
         {"scaling", m.scaling},
         {"seed", m.seed}};
    if (m.fixed_evolution_time) {
        j["fixed_evolution_time"] = *m.fixed_evolution_time;
    }
}

void from_json(const nlohmann::json &j, TrainedTSHK &m) {
    m.spec = j.at("spec").get<ansatz::AnsatzSpec>();
    m.theta = j.at("theta").get<ansatz::ParameterSet>();
    m.weights.eta = j.at("eta").get<std::vector<double>>();
    m.times = j.at("times").get<std::vector<double>>();
    m.fixed_evolution_time.reset();
    if (j.contains("fixed_evolution_time") && !j.at("fixed_evolution_time").is_null()) {
        m.fixed_evolution_time = j.at("fixed_evolution_time").get<double>();
    }
    m.scaling = j.at("scaling").get<data::Scaler>();
    m.seed = j.at("seed").get<std::uint64_t>();
}

} // namespace tshk::kernel

namespace tshk::svm {

void to_json(nlohmann::json &j, const SvmModel &m) {
    j = {{"alpha", m.alpha},     {"bias", m.bias},   {"support", m.support},
         {"labels", m.labels},   {"C", m.C},         {"iterations", m.iterations}};
}

void to_json(nlohmann::json &j, const MetricsReport &r) {
    j = {{"accuracy", r.accuracy},
         {"f1", r.f1},
         {"balanced_accuracy", r.balanced_accuracy},
         {"roc_auc", r.roc_auc},
         {"alignment_train", r.alignment_train},
         {"alignment_test", r.alignment_test}};
}

} // namespace tshk::svm

namespace tshk::qccnet {

void to_json(nlohmann::json &j, const TrainConfig &c) {
    j = {{"iterations", c.iterations},
         {"batch_size", c.batch_size},
         {"lambda", c.lambda},
         {"learning_rate", c.learning_rate},
         {"beta1", c.beta1},
         {"beta2", c.beta2},
         {"epsilon", c.epsilon},
         {"restarts", c.restarts},
         {"seed", c.seed},
         {"inner_tol", c.inner_tol},
         {"inner_max_iter", c.inner_max_iter},
         {"fixed_evolution_time", nullptr}};
    if (c.fixed_evolution_time) {
        j["fixed_evolution_time"] = *c.fixed_evolution_time;
    }
}

} // namespace tshk::qccnet

namespace tshk {

void write_json(const nlohmann::json &doc, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw IngestionError("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

void save_model(const kernel::TrainedTSHK &model, const std::filesystem::path &path) {
    write_json(nlohmann::json(model), path);
}

kernel::TrainedTSHK load_model(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open model file " + path.string());
    }
    try {
        auto model = nlohmann::json::parse(in).get<kernel::TrainedTSHK>();
        model.spec.validate();
        model.theta.check(model.spec);
        if (model.weights.eta.size() != model.times.size()) {
            throw ConfigError(path.string() + ": eta and times differ in length");
        }
        return model;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    } catch (const UsageError &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

} // namespace tshk
