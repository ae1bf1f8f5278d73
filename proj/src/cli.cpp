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
#include "tshk/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "tshk/error.hpp"
#include "tshk/qmp.hpp"
#include "tshk/random.hpp"
#include "tshk/serialize.hpp"
#include "tshk/timeprobe.hpp"

namespace tshk::cli {

namespace {

using nlohmann::json;

// Typed access to one config section that remembers which keys were read.
class Section {
  public:
    Section(const json &doc, std::string name) : name_(std::move(name)) {
        if (doc.contains(name_)) {
            obj_ = doc.at(name_);
            if (!obj_.is_object()) {
                throw ConfigError(name_ + ": expected a table of settings");
            }
        } else {
            obj_ = json::object();
        }
    }

    template <class T> void get(const char *key, T &out) {
        seen_.insert(key);
        if (!obj_.contains(key) || obj_.at(key).is_null()) {
            return;
        }
        const auto &v = obj_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) {
                    throw ConfigError(where(key) + ": expected true or false");
                }
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) {
                    throw ConfigError(where(key) + ": expected an integer");
                }
                if constexpr (std::is_unsigned_v<T>) {
                    if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
                        throw ConfigError(where(key) + ": expected a non-negative integer");
                    }
                }
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) {
                    throw ConfigError(where(key) + ": expected a number");
                }
            } else {
                if (!v.is_string()) {
                    throw ConfigError(where(key) + ": expected a string");
                }
            }
            out = v.get<T>();
        } catch (const json::exception &e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    void mark(const char *key) { seen_.insert(key); }

    [[nodiscard]] bool has(const char *key) const {
        return obj_.contains(key) && !obj_.at(key).is_null();
    }

    void finish() const {
        for (const auto &[key, _] : obj_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError("unknown key '" + name_ + "." + key + "'");
            }
        }
    }

    [[nodiscard]] std::string where(const std::string &key) const { return name_ + "." + key; }

  private:
    std::string name_;
    json obj_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string &where, const std::string &what) {
    if (!ok) {
        throw ConfigError(where + ": " + what);
    }
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest_file(const RunConfig &cfg, const std::string &command,
                         const std::filesystem::path &dir, const json &extra) {
    json doc = {{"command", command},
                {"config_hash", config_hash(cfg.source)},
                {"config", cfg.source},
                {"seed", cfg.train.seed},
                {"dataset_seed", cfg.dataset.seed},
                {"version", kVersion},
                {"payload", extra}};
    write_json(doc, dir / "manifest.json");
    // Wall-clock time is kept apart so that the manifest itself is reproducible.
    std::ofstream(dir / "manifest.time") << timestamp() << '\n';
}

std::vector<int> labels_of(const data::Dataset &ds) { return ds.labels(); }

} // namespace

RunConfig parse_config(const json &doc) {
    if (!doc.is_object()) {
        throw ConfigError("config: expected a table of sections");
    }
    static const std::set<std::string> kSections = {"dataset", "ansatz", "train", "svm",
                                                    "probe",   "qmp",    "output", "threads"};
    for (const auto &[key, _] : doc.items()) {
        if (!kSections.contains(key)) {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    RunConfig cfg;
    cfg.source = doc;
    if (doc.contains("output")) {
        require(doc.at("output").is_string(), "output", "expected a string");
        cfg.output = doc.at("output").get<std::string>();
    }
    if (doc.contains("threads")) {
        require(doc.at("threads").is_number_integer(), "threads", "expected an integer");
        cfg.threads = doc.at("threads").get<int>();
        require(cfg.threads >= 1, "threads", "must be at least 1");
    }

    Section ds(doc, "dataset");
    auto &d = cfg.dataset;
    ds.get("source", d.source);
    ds.get("n_instances", d.n_instances);
    ds.get("n_test", d.n_test);
    ds.get("p", d.p);
    ds.get("noise", d.noise);
    ds.get("seed", d.seed);
    ds.get("train_path", d.train_path);
    ds.get("test_path", d.test_path);
    ds.get("decimate", d.decimate);
    ds.get("time_scale", d.time_scale);
    ds.get("scale_lo", d.scale_lo);
    ds.get("scale_hi", d.scale_hi);
    ds.finish();
    require(d.source == "moons2circles" || d.source == "sincos" || d.source == "ucr" ||
                d.source == "csv",
            ds.where("source"), "expected moons2circles, sincos, ucr or csv");
    require(d.n_instances >= 2 && d.n_test >= 2, ds.where("n_instances"),
            "instance counts must be at least 2");
    require(d.p >= 2, ds.where("p"), "must be at least 2");
    require(d.noise >= 0.0, ds.where("noise"), "must be non-negative");
    require(d.decimate >= 1, ds.where("decimate"), "must be at least 1");
    require(d.time_scale > 0.0, ds.where("time_scale"), "must be positive");
    require(d.scale_hi > d.scale_lo, ds.where("scale_hi"), "must exceed scale_lo");
    if (d.source == "ucr" || d.source == "csv") {
        require(!d.train_path.empty() && !d.test_path.empty(), ds.where("train_path"),
                "train_path and test_path are required for file sources");
    }

    Section an(doc, "ansatz");
    auto &a = cfg.ansatz;
    std::string embedding = "qaoa";
    a.n_features = 0;
    an.get("n_qubits", a.n_qubits);
    an.get("n_features", a.n_features);
    an.get("embedding", embedding);
    an.get("embed_layers", a.embed_layers);
    an.get("sel_layers", a.sel_layers);
    a.walsh_locality = 0;
    an.get("walsh_locality", a.walsh_locality);
    an.finish();
    require(embedding == "qaoa" || embedding == "ry", an.where("embedding"),
            "expected qaoa or ry");
    a.embedding = embedding == "qaoa" ? ansatz::Embedding::Qaoa : ansatz::Embedding::RyFixed;
    if (a.walsh_locality == 0) {
        a.walsh_locality = ansatz::default_walsh_locality(a.n_qubits);
    }

    Section tr(doc, "train");
    auto &t = cfg.train;
    tr.get("iterations", t.iterations);
    tr.get("batch_size", t.batch_size);
    tr.get("lambda", t.lambda);
    tr.get("learning_rate", t.learning_rate);
    tr.get("beta1", t.beta1);
    tr.get("beta2", t.beta2);
    tr.get("epsilon", t.epsilon);
    tr.get("restarts", t.restarts);
    tr.get("seed", t.seed);
    tr.get("inner_tol", t.inner_tol);
    tr.get("inner_max_iter", t.inner_max_iter);
    tr.get("eval_split", cfg.eval_split);
    if (tr.has("fixed_evolution_time")) {
        double fixed = 0.0;
        tr.get("fixed_evolution_time", fixed);
        t.fixed_evolution_time = fixed;
    } else {
        tr.mark("fixed_evolution_time");
    }
    tr.finish();
    t.threads = cfg.threads;
    try {
        t.validate();
    } catch (const ConfigError &e) {
        throw ConfigError(std::string("train: ") + e.what());
    }
    require(cfg.eval_split == "test" || cfg.eval_split == "train", tr.where("eval_split"),
            "expected test or train");

    Section sv(doc, "svm");
    std::string mode = "combined";
    sv.get("C", cfg.svm.C);
    sv.get("mode", mode);
    sv.get("shots", cfg.svm.shots);
    sv.get("shot_seed", cfg.svm.shot_seed);
    sv.get("tikhonov", cfg.svm.tikhonov);
    sv.finish();
    require(cfg.svm.C > 0.0, sv.where("C"), "must be positive");
    require(mode == "combined" || mode == "vote", sv.where("mode"), "expected combined or vote");
    cfg.svm.mode = mode == "vote" ? SvmMode::Vote : SvmMode::Combined;

    Section pr(doc, "probe");
    pr.get("delta_min", cfg.probe.delta_min);
    pr.get("delta_max", cfg.probe.delta_max);
    pr.get("points", cfg.probe.points);
    pr.finish();
    require(cfg.probe.points >= 1, pr.where("points"), "must be at least 1");

    Section qm(doc, "qmp");
    qm.get("layout", cfg.qmp.layout);
    qm.get("line_width", cfg.qmp.line_width);
    qm.get("buffer", cfg.qmp.buffer);
    qm.get("shots", cfg.qmp.shots);
    qm.get("flip_prob", cfg.qmp.flip_prob);
    qm.get("slice", cfg.qmp.slice);
    qm.get("seed", cfg.qmp.seed);
    qm.finish();
    require(cfg.qmp.line_width >= 1, qm.where("line_width"), "must be positive");
    require(cfg.qmp.buffer >= 0, qm.where("buffer"), "must be non-negative");
    require(cfg.qmp.shots >= 1, qm.where("shots"), "must be positive");
    require(cfg.qmp.flip_prob >= 0.0 && cfg.qmp.flip_prob <= 1.0, qm.where("flip_prob"),
            "must lie in [0, 1]");
    require(cfg.qmp.slice >= 0, qm.where("slice"), "must be non-negative");
    return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

json apply_overrides(json doc, const std::vector<std::string> &overrides) {
    for (const auto &item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override '" + item + "' is not of the form key=value");
        }
        const std::string path = item.substr(0, eq);
        const std::string raw = item.substr(eq + 1);
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) {
            value = raw;
        }
        const auto dot = path.find('.');
        if (dot == std::string::npos) {
            doc[path] = value;
        } else {
            doc[path.substr(0, dot)][path.substr(dot + 1)] = value;
        }
    }
    return doc;
}

std::string config_hash(const json &doc) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : doc.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Splits load_datasets(const DatasetConfig &cfg) {
    Splits out;
    if (cfg.source == "moons2circles") {
        out.train = data::gen_moons2circles(cfg.n_instances, cfg.p, cfg.noise, cfg.seed);
        out.test = data::gen_moons2circles(cfg.n_test, cfg.p, cfg.noise,
                                           derive_seed(cfg.seed, {1}));
        out.train.name = "moons2circles-train";
        out.test.name = "moons2circles-test";
    } else if (cfg.source == "sincos") {
        out.train = data::gen_sincos(cfg.p, cfg.seed);
        out.test = out.train;
    } else if (cfg.source == "ucr") {
        std::tie(out.train, out.test) = data::load_ucr(cfg.train_path, cfg.test_path);
    } else {
        auto manifest_for = [](const std::string &csv) {
            std::filesystem::path p(csv);
            return p.replace_extension(".manifest.json");
        };
        out.train = data::read_csv(cfg.train_path, manifest_for(cfg.train_path));
        out.test = data::read_csv(cfg.test_path, manifest_for(cfg.test_path));
    }
    if (cfg.decimate > 1) {
        out.train = data::decimate(out.train, cfg.decimate);
        out.test = data::decimate(out.test, cfg.decimate);
    }
    return out;
}

std::pair<Splits, data::Scaler> prepare(const Splits &raw, const DatasetConfig &cfg) {
    const auto scaler = data::fit_scaler(raw.train, cfg.scale_lo, cfg.scale_hi);
    Splits out{data::apply_scaler(raw.train, scaler), data::apply_scaler(raw.test, scaler)};
    for (auto *ds : {&out.train, &out.test}) {
        for (auto &t : ds->times) {
            t *= cfg.time_scale;
        }
    }
    return {out, scaler};
}

KernelBlocks compute_blocks(const kernel::TrainedTSHK &model, const data::Dataset &train,
                            const data::Dataset &test, const kernel::EvalMode &mode,
                            int threads) {
    if (train.d != model.spec.n_features || test.d != model.spec.n_features) {
        throw ConfigError("dataset has " + std::to_string(train.d) + " features, model expects " +
                          std::to_string(model.spec.n_features));
    }
    if (static_cast<std::size_t>(train.p()) != model.times.size() ||
        static_cast<std::size_t>(test.p()) != model.times.size()) {
        throw ConfigError("dataset has " + std::to_string(train.p()) +
                          " time steps, model expects " + std::to_string(model.times.size()));
    }
    KernelBlocks blocks;
    blocks.train = kernel::gram_stack(model.spec, model.theta, train.instances,
                                      model.evolution_times(), mode, threads);
    blocks.cross = kernel::cross_gram(model, train.instances, test.instances, mode, threads).stack;
    return blocks;
}

EvalReport evaluate_blocks(const KernelBlocks &blocks, const kernel::KernelWeights &weights,
                           std::span<const int> y_train, std::span<const int> y_test,
                           const EvalOptions &opts) {
    EvalReport r;
    r.labels.assign(y_test.begin(), y_test.end());
    Eigen::MatrixXd k_train = kernel::combined_kernel(blocks.train, weights);
    const Eigen::MatrixXd k_cross = kernel::combined_kernel(blocks.cross, weights);
    if (opts.tikhonov) {
        k_train = svm::tikhonov_regularize(k_train);
    }
    if (opts.mode == SvmMode::Combined) {
        r.models.push_back(svm::svm_fit(k_train, y_train, opts.C));
        r.decisions = svm::decide_rows(r.models.front(), k_cross);
        for (double dv : r.decisions) {
            r.predictions.push_back(svm::predict_sign(dv));
        }
    } else {
        const std::size_t p = blocks.train.p();
        r.decisions.assign(y_test.size(), 0.0);
        std::vector<std::vector<double>> per_slice(p);
        for (std::size_t l = 0; l < p; ++l) {
            const Eigen::MatrixXd k = opts.tikhonov ? svm::tikhonov_regularize(blocks.train.mats[l])
                                                    : blocks.train.mats[l];
            r.models.push_back(svm::svm_fit(k, y_train, opts.C));
            per_slice[l] = svm::decide_rows(r.models.back(), blocks.cross.mats[l]);
            for (std::size_t i = 0; i < y_test.size(); ++i) {
                r.decisions[i] += weights.eta[l] * per_slice[l][i];
            }
        }
        std::vector<double> d(p);
        for (std::size_t i = 0; i < y_test.size(); ++i) {
            for (std::size_t l = 0; l < p; ++l) {
                d[l] = per_slice[l][i];
            }
            r.predictions.push_back(svm::per_time_vote(d, weights));
        }
    }
    r.metrics = svm::metrics(y_test, r.predictions, r.decisions);
    r.metrics.alignment_train = svm::kernel_alignment(k_train, y_train);
    r.metrics.alignment_test = svm::kernel_alignment(k_cross, y_test, y_train);
    return r;
}

EvalReport evaluate_model(const kernel::TrainedTSHK &model, const data::Dataset &train,
                          const data::Dataset &test, const EvalOptions &opts) {
    const auto blocks = compute_blocks(model, train, test, opts.kernel_mode, opts.threads);
    return evaluate_blocks(blocks, model.weights, labels_of(train), labels_of(test), opts);
}

QmpReport qmp_experiment(const kernel::TrainedTSHK &model, const data::Dataset &train,
                         std::size_t n_test, const QmpConfig &cfg, int threads) {
    const int width = model.spec.n_qubits;
    const auto times = model.evolution_times();
    if (static_cast<std::size_t>(cfg.slice) >= times.size()) {
        throw ConfigError("qmp.slice " + std::to_string(cfg.slice) + " is outside the " +
                          std::to_string(times.size()) + "-step grid");
    }
    if (static_cast<std::size_t>(train.p()) != times.size()) {
        throw ConfigError("dataset and model time grids differ");
    }
    const auto layout = cfg.layout.empty()
                            ? qmp::pack(width, qmp::Device::line(cfg.line_width), cfg.buffer)
                            : qmp::load_layout(cfg.layout);
    const std::size_t trf = qmp::trf(layout);
    std::vector<char> used(trf, 0);
    for (const auto &a : layout.assignments) {
        if (static_cast<int>(a.qubits.size()) != width) {
            throw ConfigError("layout window for circuit " + std::to_string(a.circuit) + " has " +
                              std::to_string(a.qubits.size()) + " qubits, the model uses " +
                              std::to_string(width));
        }
        if (a.circuit >= trf || used[a.circuit] != 0) {
            throw ConfigError("layout circuit ids must be 0.." + std::to_string(trf - 1));
        }
        used[a.circuit] = 1;
    }

    QmpReport rep;
    rep.trf = trf;
    rep.active_qubits = layout.active_qubits();
    const auto calls = qmp::qpu_calls(train.size(), n_test, times.size(), trf);
    rep.serial_calls = calls.serial;
    rep.packed_calls = calls.packed;

    const int l = cfg.slice;
    const double t = times[static_cast<std::size_t>(l)];
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<sim::Program> circuits;
    for (std::size_t i = 0; i < train.size(); ++i) {
        for (std::size_t j = i + 1; j < train.size(); ++j) {
            pairs.emplace_back(i, j);
            circuits.push_back(ansatz::build_kernel_circuit(model.spec, train.instances[i].at(l),
                                                            train.instances[j].at(l), model.theta,
                                                            t));
        }
    }
    rep.circuits = circuits.size();
    const auto n = static_cast<Eigen::Index>(train.size());
    rep.gram_serial = Eigen::MatrixXd::Identity(n, n);
    rep.gram_packed = Eigen::MatrixXd::Identity(n, n);
    const std::uint64_t outcomes = std::uint64_t{1} << static_cast<unsigned>(width);
    const std::string zeros(static_cast<std::size_t>(width), '0');
    double fid_sum = 0.0;

    for (std::size_t start = 0; start < circuits.size(); start += trf) {
        const std::size_t chunk = std::min(trf, circuits.size() - start);
        const std::uint64_t seed = derive_seed(cfg.seed, {start / trf});
        qmp::QmpLayout run_layout = layout;
        std::erase_if(run_layout.assignments,
                      [&](const qmp::Assignment &a) { return a.circuit >= chunk; });
        const std::span<const sim::Program> batch(circuits.data() + start, chunk);
        const auto joint =
            qmp::run_packed(run_layout, batch, width, cfg.shots, seed, cfg.flip_prob, threads);
        ++rep.joint_runs;
        for (const auto &a : run_layout.assignments) {
            const std::size_t c = start + a.circuit;
            const auto serial = qmp::run_serial(circuits[c], width, cfg.shots, seed, a.circuit,
                                                cfg.flip_prob);
            auto packed = qmp::partial_measurement(joint, a.qubits, false);
            rep.counts_identical = rep.counts_identical && packed.counts == serial.counts;

            const auto [i, j] = pairs[c];
            const auto zs = serial.counts.find(zeros);
            const auto zp = packed.counts.find(zeros);
            const double ks = zs == serial.counts.end()
                                  ? 0.0
                                  : static_cast<double>(zs->second) / static_cast<double>(cfg.shots);
            const double kp = zp == packed.counts.end()
                                  ? 0.0
                                  : static_cast<double>(zp->second) / static_cast<double>(cfg.shots);
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            rep.gram_serial(ii, jj) = rep.gram_serial(jj, ii) = ks;
            rep.gram_packed(ii, jj) = rep.gram_packed(jj, ii) = kp;
            rep.max_gram_difference = std::max(rep.max_gram_difference, std::abs(ks - kp));

            const auto p_packed = qmp::to_distribution(packed);
            const double f =
                qmp::result_fidelity(p_packed, qmp::to_distribution(serial), outcomes);
            rep.fidelities.push_back(f);
            fid_sum += f;
            rep.min_fidelity = std::min(rep.min_fidelity, f);
            try {
                const auto ideal = qmp::exact_distribution(sim::run(circuits[c], width));
                rep.min_fidelity_ideal = std::min(
                    rep.min_fidelity_ideal, qmp::result_fidelity(p_packed, ideal, outcomes));
            } catch (const DegenerateError &) {
                ++rep.ideal_degenerate;
            }
        }
    }
    if (!rep.fidelities.empty()) {
        rep.mean_fidelity = fid_sum / static_cast<double>(rep.fidelities.size());
    }
    return rep;
}

namespace {

void write_matrix_csv(const Eigen::MatrixXd &m, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw IngestionError("cannot write " + path.string());
    }
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j == 0 ? "" : ",") << m(i, j);
        }
        out << '\n';
    }
}

kernel::TrainedTSHK require_model(const CommandOptions &opts) {
    if (!opts.model_path) {
        throw ConfigError("this command needs --model");
    }
    return load_model(*opts.model_path);
}

void check_model_data(const kernel::TrainedTSHK &model, const Splits &data) {
    if (data.train.d != model.spec.n_features ||
        static_cast<std::size_t>(data.train.p()) != model.times.size()) {
        throw ConfigError("model expects p=" + std::to_string(model.times.size()) +
                          ", d=" + std::to_string(model.spec.n_features) + "; dataset has p=" +
                          std::to_string(data.train.p()) + ", d=" + std::to_string(data.train.d));
    }
}

// Datasets scaled with the model's stored scaler.
Splits scaled_for_model(const RunConfig &cfg, const kernel::TrainedTSHK &model) {
    const auto raw = load_datasets(cfg.dataset);
    Splits out{data::apply_scaler(raw.train, model.scaling),
               data::apply_scaler(raw.test, model.scaling)};
    for (auto *ds : {&out.train, &out.test}) {
        for (auto &t : ds->times) {
            t *= cfg.dataset.time_scale;
        }
    }
    check_model_data(model, out);
    return out;
}

int cmd_generate(const RunConfig &cfg, const std::filesystem::path &dir) {
    const auto raw = load_datasets(cfg.dataset);
    data::write_csv(raw.train, dir / "train.csv");
    data::write_manifest(raw.train, dir / "train.manifest.json");
    data::write_csv(raw.test, dir / "test.csv");
    data::write_manifest(raw.test, dir / "test.manifest.json");
    write_manifest_file(cfg, "generate", dir,
                        {{"train", raw.train.size()}, {"test", raw.test.size()},
                         {"p", raw.train.p()}, {"d", raw.train.d}});
    std::cout << "wrote " << raw.train.size() << " training and " << raw.test.size()
              << " test instances to " << dir.string() << '\n';
    return 0;
}

int cmd_train(const RunConfig &cfg, const std::filesystem::path &dir) {
    const auto raw = load_datasets(cfg.dataset);
    auto [data, scaler] = prepare(raw, cfg.dataset);
    auto spec = cfg.ansatz;
    if (spec.n_features == 0) {
        spec.n_features = data.train.d;
    }
    const auto &eval = cfg.eval_split == "test" ? data.test : data.train;
    auto result = qccnet::train(data.train, eval, spec, cfg.train);
    result.model.scaling = scaler;
    save_model(result.model, dir / "model.json");

    std::ofstream trace(dir / "loss_trace.csv");
    trace << std::setprecision(17) << "restart,iteration,loss,normalized_loss\n";
    const double norm = static_cast<double>(cfg.train.batch_size * cfg.train.batch_size);
    for (std::size_t r = 0; r < result.restarts.size(); ++r) {
        const auto &rec = result.restarts[r];
        for (std::size_t it = 0; it < rec.loss_trace.size(); ++it) {
            trace << r << ',' << it << ',' << rec.loss_trace[it] << ','
                  << rec.loss_trace[it] / norm << '\n';
        }
    }
    std::ofstream restarts(dir / "restarts.csv");
    restarts << std::setprecision(17) << "restart,seed,eval_loss,ok,selected,message\n";
    for (std::size_t r = 0; r < result.restarts.size(); ++r) {
        const auto &rec = result.restarts[r];
        restarts << r << ',' << rec.seed << ',' << rec.eval_loss << ',' << (rec.ok ? 1 : 0) << ','
                 << (r == result.best_restart ? 1 : 0) << ",\"" << rec.message << "\"\n";
    }
    write_manifest_file(cfg, "train", dir,
                        {{"best_restart", result.best_restart},
                         {"final_loss", result.final_solution.loss_value},
                         {"train_config", cfg.train}});
    std::cout << "trained " << spec.name() << ": best restart " << result.best_restart
              << ", eval loss " << result.restarts[result.best_restart].eval_loss << '\n';
    return 0;
}

int cmd_eval(const RunConfig &cfg, const CommandOptions &opts, const std::filesystem::path &dir) {
    const auto model = require_model(opts);
    const auto data = scaled_for_model(cfg, model);
    EvalOptions eo;
    eo.C = cfg.svm.C;
    eo.mode = cfg.svm.mode;
    eo.tikhonov = cfg.svm.tikhonov;
    eo.threads = cfg.threads;
    eo.kernel_mode = cfg.svm.shots == 0
                         ? kernel::EvalMode::exact()
                         : kernel::EvalMode::sampled(cfg.svm.shots, cfg.svm.shot_seed);
    const auto report = evaluate_model(model, data.train, data.test, eo);

    write_json(json(report.metrics), dir / "metrics.json");
    std::ofstream dec(dir / "decisions.csv");
    dec << std::setprecision(17) << "index,label,decision,prediction\n";
    for (std::size_t i = 0; i < report.decisions.size(); ++i) {
        dec << i << ',' << report.labels[i] << ',' << report.decisions[i] << ','
            << report.predictions[i] << '\n';
    }
    std::ofstream w(dir / "weights.csv");
    w << std::setprecision(17) << "slice,t,eta\n";
    for (std::size_t l = 0; l < model.times.size(); ++l) {
        w << l << ',' << model.times[l] << ',' << model.weights.eta[l] << '\n';
    }
    write_json(json(report.models), dir / "svm.json");
    write_manifest_file(cfg, "eval", dir, {{"model", opts.model_path->string()}});
    const auto &m = report.metrics;
    std::cout << std::setprecision(4) << "accuracy " << m.accuracy << "  f1 " << m.f1
              << "  balanced accuracy " << m.balanced_accuracy << "  roc auc " << m.roc_auc
              << '\n';
    return 0;
}

int cmd_probe(const RunConfig &cfg, const CommandOptions &opts, const std::filesystem::path &dir) {
    const auto model = require_model(opts);
    const auto deltas =
        timeprobe::linspace(cfg.probe.delta_min, cfg.probe.delta_max, cfg.probe.points);
    const auto result =
        timeprobe::probe(model.spec, model.theta, deltas, model.evolution_times(), cfg.threads);
    timeprobe::write_probe_csv(result, dir / "probe.csv");
    write_manifest_file(cfg, "probe", dir, {{"model", opts.model_path->string()}});
    std::cout << "wrote " << deltas.size() << " probe points to " << (dir / "probe.csv").string()
              << '\n';
    return 0;
}

int cmd_qmp(const RunConfig &cfg, const CommandOptions &opts, const std::filesystem::path &dir) {
    const auto model = require_model(opts);
    const auto data = scaled_for_model(cfg, model);
    const auto rep = qmp_experiment(model, data.train, data.test.size(), cfg.qmp, cfg.threads);
    json doc = {{"trf", rep.trf},
                {"active_qubits", rep.active_qubits},
                {"slice", cfg.qmp.slice},
                {"circuits", rep.circuits},
                {"joint_runs", rep.joint_runs},
                {"serial_calls", rep.serial_calls},
                {"packed_calls", rep.packed_calls},
                {"min_fidelity", rep.min_fidelity},
                {"mean_fidelity", rep.mean_fidelity},
                {"min_fidelity_vs_exact", rep.min_fidelity_ideal},
                {"exact_uniform_circuits", rep.ideal_degenerate},
                {"max_gram_difference", rep.max_gram_difference},
                {"counts_identical", rep.counts_identical}};
    write_json(doc, dir / "qmp_report.json");
    write_matrix_csv(rep.gram_serial, dir / "gram_serial.csv");
    write_matrix_csv(rep.gram_packed, dir / "gram_packed.csv");
    std::ofstream fid(dir / "fidelity.csv");
    fid << std::setprecision(17) << "circuit,fidelity\n";
    for (std::size_t c = 0; c < rep.fidelities.size(); ++c) {
        fid << c << ',' << rep.fidelities[c] << '\n';
    }
    write_manifest_file(cfg, "qmp", dir, {{"model", opts.model_path->string()}});
    std::cout << "TRF " << rep.trf << ", serial calls " << rep.serial_calls << ", packed calls "
              << rep.packed_calls << ", min fidelity " << rep.min_fidelity << '\n';
    return 0;
}

} // namespace

int run_command(const RunConfig &config, const CommandOptions &opts) {
    try {
        const std::filesystem::path dir = opts.output ? *opts.output : std::filesystem::path(config.output);
        std::filesystem::create_directories(dir);
        if (opts.command == "generate") {
            return cmd_generate(config, dir);
        }
        if (opts.command == "train") {
            return cmd_train(config, dir);
        }
        if (opts.command == "eval") {
            return cmd_eval(config, opts, dir);
        }
        if (opts.command == "probe") {
            return cmd_probe(config, opts, dir);
        }
        if (opts.command == "qmp") {
            return cmd_qmp(config, opts, dir);
        }
        throw ConfigError("unknown command '" + opts.command + "'");
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const IngestionError &e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError &e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace tshk::cli
