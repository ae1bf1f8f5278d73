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
#include "tshk/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "tshk/error.hpp"
#include "tshk/random.hpp"

namespace tshk::data {

namespace {

struct Point {
    double x;
    double y;
    double angle;
};

std::vector<Point> sample_arc(Rng &rng, int count, double cx, double cy, double radius,
                              double sign, double span, double noise_std) {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double a = uniform(rng, 0.0, span);
        const double x = cx + radius * std::cos(a) + noise_std * standard_normal(rng);
        const double y = cy + sign * radius * std::sin(a) + noise_std * standard_normal(rng);
        pts.push_back({x, y, a});
    }
    std::sort(pts.begin(), pts.end(), [](const Point &l, const Point &r) { return l.angle < r.angle; });
    return pts;
}

std::vector<std::string> split(const std::string &line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delim)) {
        out.push_back(field);
    }
    return out;
}

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string &field, const std::string &where) {
    const auto text = trim(field);
    double v = 0.0;
    const auto *first = text.data();
    const auto *last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw IngestionError(where + ": non-numeric field '" + text + "'");
    }
    if (!std::isfinite(v)) {
        throw IngestionError(where + ": non-finite value '" + text + "'");
    }
    return v;
}

std::vector<double> unit_grid(int p) {
    std::vector<double> times(static_cast<std::size_t>(p));
    for (int l = 0; l < p; ++l) {
        times[static_cast<std::size_t>(l)] = static_cast<double>(l + 1) / p;
    }
    return times;
}

} // namespace

std::vector<int> Dataset::labels() const {
    std::vector<int> out;
    out.reserve(instances.size());
    for (const auto &inst : instances) {
        out.push_back(inst.label);
    }
    return out;
}

bool Dataset::has_both_classes() const {
    bool pos = false;
    bool neg = false;
    for (const auto &inst : instances) {
        pos = pos || inst.label == 1;
        neg = neg || inst.label == -1;
    }
    return pos && neg;
}

void Dataset::validate() const {
    if (times.empty() || d < 1) {
        throw UsageError("dataset '" + name + "' needs p >= 1 and d >= 1");
    }
    for (std::size_t l = 1; l < times.size(); ++l) {
        if (!(times[l] > times[l - 1])) {
            throw UsageError("dataset '" + name + "' time grid is not strictly increasing");
        }
    }
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto &inst = instances[i];
        if (inst.p != p() || inst.d != d ||
            inst.values.size() != static_cast<std::size_t>(inst.p) * static_cast<std::size_t>(d)) {
            throw UsageError("instance " + std::to_string(i) + " of '" + name +
                             "' does not match the dataset shape");
        }
        if (inst.label != 1 && inst.label != -1) {
            throw UsageError("instance " + std::to_string(i) + " has label " +
                             std::to_string(inst.label) + ", expected +1 or -1");
        }
        if (!std::all_of(inst.values.begin(), inst.values.end(),
                         [](double v) { return std::isfinite(v); })) {
            throw UsageError("instance " + std::to_string(i) + " has non-finite values");
        }
    }
}

Dataset gen_moons2circles(int n_instances, int p, double noise_std, std::uint64_t seed) {
    if (n_instances < 2 || n_instances % 2 != 0) {
        throw UsageError("moons2circles needs an even, positive instance count");
    }
    if (p < 2) {
        throw UsageError("moons2circles needs p >= 2");
    }
    constexpr double pi = std::numbers::pi;
    Rng rng(seed);
    const int half = n_instances / 2;
    // Class -1: upper moon and outer circle. Class +1: lower moon and inner circle.
    const auto moon_neg = sample_arc(rng, half, 0.0, 0.0, 1.0, 1.0, pi, noise_std);
    const auto moon_pos = sample_arc(rng, half, 1.0, 0.5, 1.0, -1.0, pi, noise_std);
    const auto circ_neg = sample_arc(rng, half, 0.0, 0.0, 1.0, 1.0, 2 * pi, noise_std);
    const auto circ_pos = sample_arc(rng, half, 0.0, 0.0, 0.5, 1.0, 2 * pi, noise_std);

    Dataset ds;
    ds.name = "moons2circles";
    ds.d = 2;
    ds.seed = seed;
    ds.times.resize(static_cast<std::size_t>(p));
    for (int l = 0; l < p; ++l) {
        ds.times[static_cast<std::size_t>(l)] = static_cast<double>(l) / (p - 1);
    }
    auto make = [&](const Point &m, const Point &c, int label) {
        Instance inst{{}, p, 2, label};
        inst.values.reserve(static_cast<std::size_t>(2 * p));
        for (double s : ds.times) {
            inst.values.push_back((1 - s) * m.x + s * c.x);
            inst.values.push_back((1 - s) * m.y + s * c.y);
        }
        return inst;
    };
    for (int i = 0; i < half; ++i) {
        const auto k = static_cast<std::size_t>(i);
        ds.instances.push_back(make(moon_neg[k], circ_neg[k], -1));
        ds.instances.push_back(make(moon_pos[k], circ_pos[k], 1));
    }
    for (std::size_t i = ds.instances.size(); i > 1; --i) {
        std::swap(ds.instances[i - 1], ds.instances[uniform_index(rng, i)]);
    }
    return ds;
}

Dataset gen_sincos(int p, std::uint64_t seed, double t_max) {
    if (p < 2) {
        throw UsageError("sincos needs p >= 2");
    }
    Dataset ds;
    ds.name = "sincos";
    ds.d = 1;
    ds.seed = seed;
    Instance sin_inst{{}, p, 1, 1};
    Instance cos_inst{{}, p, 1, -1};
    for (int l = 0; l < p; ++l) {
        const double t = t_max * l / (p - 1);
        ds.times.push_back(t);
        sin_inst.values.push_back(-std::sin(t));
        cos_inst.values.push_back(-std::cos(t));
    }
    ds.instances = {sin_inst, cos_inst};
    return ds;
}

Dataset load_ucr_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestionError("cannot open " + path.string());
    }
    Dataset ds;
    ds.name = path.stem().string();
    ds.d = 1;
    std::string line;
    int line_no = 0;
    char delim = 0;
    int p = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (delim == 0) {
            delim = line.find('\t') != std::string::npos ? '\t' : ',';
        }
        const auto fields = split(trim(line), delim);
        if (fields.size() < 2) {
            throw IngestionError(where + ": expected a label and at least one value");
        }
        const double raw_label = parse_double(fields[0], where);
        int label = 0;
        if (raw_label == 1.0) {
            label = 1;
        } else if (raw_label == 2.0) {
            label = -1;
        } else {
            throw IngestionError(where + ": unknown class label '" + trim(fields[0]) + "'");
        }
        const int len = static_cast<int>(fields.size()) - 1;
        if (p < 0) {
            p = len;
        } else if (len != p) {
            throw IngestionError(where + ": ragged row with " + std::to_string(len) +
                                 " values, expected " + std::to_string(p));
        }
        Instance inst{{}, p, 1, label};
        inst.values.reserve(static_cast<std::size_t>(p));
        for (std::size_t k = 1; k < fields.size(); ++k) {
            inst.values.push_back(parse_double(fields[k], where));
        }
        ds.instances.push_back(std::move(inst));
    }
    if (ds.instances.empty()) {
        throw IngestionError(path.string() + ": no instances");
    }
    ds.times = unit_grid(p);
    return ds;
}

std::pair<Dataset, Dataset> load_ucr(const std::filesystem::path &train_path,
                                     const std::filesystem::path &test_path) {
    auto train = load_ucr_file(train_path);
    auto test = load_ucr_file(test_path);
    if (train.p() != test.p()) {
        throw IngestionError("train and test series lengths differ (" +
                             std::to_string(train.p()) + " vs " + std::to_string(test.p()) + ")");
    }
    return {std::move(train), std::move(test)};
}

void save_ucr(const Dataset &ds, const std::filesystem::path &path) {
    if (ds.d != 1) {
        throw UsageError("UCR text format holds univariate series only");
    }
    std::ofstream out(path);
    if (!out) {
        throw IngestionError("cannot write " + path.string());
    }
    out << std::setprecision(17);
    for (const auto &inst : ds.instances) {
        out << (inst.label == 1 ? 1 : 2);
        for (double v : inst.values) {
            out << '\t' << v;
        }
        out << '\n';
    }
}

Dataset decimate(const Dataset &ds, int factor) {
    if (factor < 1 || factor > ds.p()) {
        throw UsageError("decimation factor " + std::to_string(factor) + " outside [1, p=" +
                         std::to_string(ds.p()) + "]");
    }
    Dataset out;
    out.name = ds.name;
    out.d = ds.d;
    out.seed = ds.seed;
    std::vector<int> keep;
    for (int l = 0; l < ds.p(); l += factor) {
        keep.push_back(l);
        out.times.push_back(ds.times[static_cast<std::size_t>(l)]);
    }
    const int p = static_cast<int>(keep.size());
    for (const auto &inst : ds.instances) {
        Instance sub{{}, p, ds.d, inst.label};
        for (int l : keep) {
            const auto row = inst.at(l);
            sub.values.insert(sub.values.end(), row.begin(), row.end());
        }
        out.instances.push_back(std::move(sub));
    }
    return out;
}

Scaler fit_scaler(const Dataset &train, double range_lo, double range_hi) {
    Scaler scaler;
    const auto d = static_cast<std::size_t>(train.d);
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (const auto &inst : train.instances) {
        for (std::size_t k = 0; k < inst.values.size(); ++k) {
            lo[k % d] = std::min(lo[k % d], inst.values[k]);
            hi[k % d] = std::max(hi[k % d], inst.values[k]);
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (!(hi[j] > lo[j])) {
            scaler.scale.push_back(0.0);
            scaler.offset.push_back((range_lo + range_hi) / 2);
            scaler.degenerate_dims.push_back(static_cast<int>(j));
            continue;
        }
        const double s = (range_hi - range_lo) / (hi[j] - lo[j]);
        scaler.scale.push_back(s);
        scaler.offset.push_back(range_lo - s * lo[j]);
    }
    return scaler;
}

Dataset apply_scaler(const Dataset &ds, const Scaler &scaler) {
    const auto d = static_cast<std::size_t>(ds.d);
    if (scaler.scale.size() != d) {
        throw UsageError("scaler has " + std::to_string(scaler.scale.size()) +
                         " dimensions, dataset has " + std::to_string(d));
    }
    Dataset out = ds;
    for (auto &inst : out.instances) {
        for (std::size_t k = 0; k < inst.values.size(); ++k) {
            inst.values[k] = scaler.scale[k % d] * inst.values[k] + scaler.offset[k % d];
        }
    }
    return out;
}

void write_csv(const Dataset &ds, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw IngestionError("cannot write " + path.string());
    }
    out << "label";
    for (int l = 1; l <= ds.p(); ++l) {
        for (int j = 1; j <= ds.d; ++j) {
            out << ",t" << l << "_f" << j;
        }
    }
    out << '\n' << std::setprecision(17);
    for (const auto &inst : ds.instances) {
        out << inst.label;
        for (double v : inst.values) {
            out << ',' << v;
        }
        out << '\n';
    }
}

void write_manifest(const Dataset &ds, const std::filesystem::path &path) {
    nlohmann::json j = {{"name", ds.name}, {"n", ds.size()}, {"p", ds.p()},
                        {"d", ds.d},       {"times", ds.times}, {"seed", ds.seed}};
    std::ofstream out(path);
    if (!out) {
        throw IngestionError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

Dataset read_csv(const std::filesystem::path &csv_path,
                 const std::filesystem::path &manifest_path) {
    std::ifstream min(manifest_path);
    if (!min) {
        throw IngestionError("cannot open " + manifest_path.string());
    }
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(min);
    } catch (const nlohmann::json::exception &e) {
        throw IngestionError(manifest_path.string() + ": " + e.what());
    }
    Dataset ds;
    ds.name = manifest.value("name", std::string{"dataset"});
    ds.d = manifest.at("d").get<int>();
    ds.times = manifest.at("times").get<std::vector<double>>();
    ds.seed = manifest.value("seed", std::uint64_t{0});
    const int p = ds.p();
    const std::size_t width = static_cast<std::size_t>(p) * static_cast<std::size_t>(ds.d);

    std::ifstream in(csv_path);
    if (!in) {
        throw IngestionError("cannot open " + csv_path.string());
    }
    std::string line;
    int line_no = 0;
    std::getline(in, line);
    ++line_no;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const std::string where = csv_path.string() + ":" + std::to_string(line_no);
        const auto fields = split(trim(line), ',');
        if (fields.size() != width + 1) {
            throw IngestionError(where + ": expected " + std::to_string(width + 1) + " fields");
        }
        const double label = parse_double(fields[0], where);
        if (label != 1.0 && label != -1.0) {
            throw IngestionError(where + ": label must be +1 or -1");
        }
        Instance inst{{}, p, ds.d, static_cast<int>(label)};
        for (std::size_t k = 1; k < fields.size(); ++k) {
            inst.values.push_back(parse_double(fields[k], where));
        }
        ds.instances.push_back(std::move(inst));
    }
    ds.validate();
    return ds;
}

} // namespace tshk::data
