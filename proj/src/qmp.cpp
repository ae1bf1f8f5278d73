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
#include "tshk/qmp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>

#include <json.hpp>

#include "tshk/error.hpp"
#include "tshk/parallel.hpp"
#include "tshk/random.hpp"

namespace tshk::qmp {

namespace {

constexpr std::uint64_t kFlipDomain = 0x666c6970ULL;

// Hop distances from `sources`, truncated at `limit`.
std::vector<int> bfs(const std::vector<std::vector<int>> &adj, std::span<const int> sources,
                     int limit) {
    std::vector<int> dist(adj.size(), -1);
    std::deque<int> queue;
    for (int s : sources) {
        dist[static_cast<std::size_t>(s)] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        if (dist[static_cast<std::size_t>(u)] >= limit) {
            continue;
        }
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

bool connected(const std::vector<std::vector<int>> &adj, std::span<const int> window) {
    if (window.empty()) {
        return false;
    }
    std::vector<int> seen{window[0]};
    for (std::size_t k = 0; k < seen.size(); ++k) {
        for (int v : adj[static_cast<std::size_t>(seen[k])]) {
            const bool inside = std::find(window.begin(), window.end(), v) != window.end();
            if (inside && std::find(seen.begin(), seen.end(), v) == seen.end()) {
                seen.push_back(v);
            }
        }
    }
    return seen.size() == window.size();
}

// True if `window` keeps more than `buffer` hops from every qubit in `taken`.
bool buffered(const std::vector<std::vector<int>> &adj, std::span<const int> window,
              const std::vector<char> &taken, int buffer) {
    const auto dist = bfs(adj, window, buffer);
    for (std::size_t q = 0; q < dist.size(); ++q) {
        if (dist[q] >= 0 && taken[q] != 0) {
            return false;
        }
    }
    return true;
}

void flip_bits(std::vector<std::uint64_t> &outcomes, int n_qubits, double flip_prob,
               std::uint64_t seed) {
    if (flip_prob <= 0.0) {
        return;
    }
    Rng rng(derive_seed(seed, {kFlipDomain}));
    for (auto &o : outcomes) {
        for (int q = 0; q < n_qubits; ++q) {
            if (uniform01(rng) < flip_prob) {
                o ^= std::uint64_t{1} << static_cast<unsigned>(q);
            }
        }
    }
}

void check_key(const std::string &key, int width) {
    if (static_cast<int>(key.size()) != width) {
        throw UsageError("key '" + key + "' has length " + std::to_string(key.size()) +
                         ", expected " + std::to_string(width));
    }
}

} // namespace

Device Device::line(int width) {
    if (width < 1) {
        throw ConfigError("device width must be positive");
    }
    return {width, {}};
}

std::vector<std::vector<int>> Device::adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(width));
    if (edges.empty()) {
        for (int q = 0; q + 1 < width; ++q) {
            adj[static_cast<std::size_t>(q)].push_back(q + 1);
            adj[static_cast<std::size_t>(q + 1)].push_back(q);
        }
        return adj;
    }
    for (const auto &[a, b] : edges) {
        if (a < 0 || b < 0 || a >= width || b >= width || a == b) {
            throw ConfigError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                              ") is invalid on a " + std::to_string(width) + "-qubit device");
        }
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto &row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
}

std::size_t QmpLayout::active_qubits() const {
    std::size_t total = 0;
    for (const auto &a : assignments) {
        total += a.qubits.size();
    }
    return total;
}

void validate_layout(const QmpLayout &layout) {
    if (layout.buffer < 0) {
        throw ConfigError("buffer must be non-negative");
    }
    const auto adj = layout.device.adjacency();
    const auto width = static_cast<std::size_t>(layout.device.width);
    std::vector<char> used(width, 0);
    std::vector<std::size_t> owner(width, 0);
    for (std::size_t a = 0; a < layout.assignments.size(); ++a) {
        const auto &w = layout.assignments[a].qubits;
        for (int q : w) {
            if (q < 0 || static_cast<std::size_t>(q) >= width) {
                throw CapacityError("circuit " + std::to_string(layout.assignments[a].circuit) +
                                    " uses qubit " + std::to_string(q) + " outside the device");
            }
            if (used[static_cast<std::size_t>(q)] != 0) {
                throw CapacityError("qubit " + std::to_string(q) + " is assigned twice");
            }
            used[static_cast<std::size_t>(q)] = 1;
            owner[static_cast<std::size_t>(q)] = a;
        }
        if (!connected(adj, w)) {
            throw CapacityError("window of circuit " +
                                std::to_string(layout.assignments[a].circuit) +
                                " is not connected on the device");
        }
    }
    for (std::size_t a = 0; a < layout.assignments.size(); ++a) {
        const auto dist = bfs(adj, layout.assignments[a].qubits, layout.buffer);
        for (std::size_t q = 0; q < width; ++q) {
            if (dist[q] >= 0 && used[q] != 0 && owner[q] != a) {
                throw CapacityError(
                    "circuits " + std::to_string(layout.assignments[a].circuit) + " and " +
                    std::to_string(layout.assignments[owner[q]].circuit) + " are closer than " +
                    std::to_string(layout.buffer) + " buffer qubit(s)");
            }
        }
    }
}

QmpLayout pack(int circuit_width, const Device &device, int buffer, std::size_t max_circuits) {
    if (circuit_width < 1) {
        throw ConfigError("circuit width must be positive");
    }
    if (buffer < 0) {
        throw ConfigError("buffer must be non-negative");
    }
    const auto adj = device.adjacency();
    // Depth-first ordering, lowest-index neighbour first; a line maps to itself.
    std::vector<int> order;
    std::vector<char> visited(adj.size(), 0);
    for (int root = 0; root < device.width; ++root) {
        if (visited[static_cast<std::size_t>(root)] != 0) {
            continue;
        }
        std::vector<int> stack{root};
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            if (visited[static_cast<std::size_t>(u)] != 0) {
                continue;
            }
            visited[static_cast<std::size_t>(u)] = 1;
            order.push_back(u);
            const auto &nb = adj[static_cast<std::size_t>(u)];
            for (auto it = nb.rbegin(); it != nb.rend(); ++it) {
                if (visited[static_cast<std::size_t>(*it)] == 0) {
                    stack.push_back(*it);
                }
            }
        }
    }

    QmpLayout layout{device, buffer, {}};
    std::vector<char> taken(adj.size(), 0);
    const auto w = static_cast<std::size_t>(circuit_width);
    std::size_t s = 0;
    while (s + w <= order.size() && layout.assignments.size() < max_circuits) {
        std::vector<int> window(order.begin() + static_cast<std::ptrdiff_t>(s),
                                order.begin() + static_cast<std::ptrdiff_t>(s + w));
        const bool free = std::none_of(window.begin(), window.end(), [&](int q) {
            return taken[static_cast<std::size_t>(q)] != 0;
        });
        if (free && connected(adj, window) && buffered(adj, window, taken, buffer)) {
            for (int q : window) {
                taken[static_cast<std::size_t>(q)] = 1;
            }
            layout.assignments.push_back({layout.assignments.size(), std::move(window)});
            s += w;
        } else {
            ++s;
        }
    }
    if (layout.assignments.empty()) {
        throw CapacityError("no " + std::to_string(circuit_width) + "-qubit window fits on a " +
                            std::to_string(device.width) + "-qubit device");
    }
    return layout;
}

std::size_t trf(const QmpLayout &layout) { return layout.assignments.size(); }

std::uint64_t circuit_seed(std::uint64_t seed, std::size_t circuit) {
    return derive_seed(seed, {static_cast<std::uint64_t>(circuit)});
}

std::vector<std::uint64_t> sample_circuit(const sim::Program &program, int n_qubits,
                                          std::uint64_t shots, std::uint64_t seed,
                                          double flip_prob) {
    if (flip_prob < 0.0 || flip_prob > 1.0) {
        throw ConfigError("flip probability must lie in [0, 1]");
    }
    auto outcomes = sim::sample_shots(sim::run(program, n_qubits), shots, seed);
    flip_bits(outcomes, n_qubits, flip_prob, seed);
    return outcomes;
}

sim::CountsMap run_serial(const sim::Program &program, int n_qubits, std::uint64_t shots,
                          std::uint64_t seed, std::size_t circuit, double flip_prob) {
    const auto outcomes =
        sample_circuit(program, n_qubits, shots, circuit_seed(seed, circuit), flip_prob);
    sim::CountsMap counts{n_qubits, shots, {}};
    for (auto o : outcomes) {
        ++counts.counts[sim::to_bitstring(o, n_qubits)];
    }
    return counts;
}

sim::CountsMap run_packed(const QmpLayout &layout, std::span<const sim::Program> circuits,
                          int circuit_width, std::uint64_t shots, std::uint64_t seed,
                          double flip_prob, int threads) {
    validate_layout(layout);
    for (const auto &a : layout.assignments) {
        if (a.circuit >= circuits.size()) {
            throw UsageError("layout refers to circuit " + std::to_string(a.circuit) + " of " +
                             std::to_string(circuits.size()));
        }
        if (static_cast<int>(a.qubits.size()) != circuit_width) {
            throw UsageError("window of circuit " + std::to_string(a.circuit) + " has " +
                             std::to_string(a.qubits.size()) + " qubits, circuits have " +
                             std::to_string(circuit_width));
        }
    }
    const std::size_t n_assign = layout.assignments.size();
    std::vector<std::vector<std::uint64_t>> samples(n_assign);
    parallel_for(n_assign, threads, [&](std::size_t k) {
        const auto &a = layout.assignments[k];
        samples[k] = sample_circuit(circuits[a.circuit], circuit_width, shots,
                                    circuit_seed(seed, a.circuit), flip_prob);
    });

    const int width = layout.device_width();
    sim::CountsMap joint{width, shots, {}};
    std::string key(static_cast<std::size_t>(width), '0');
    for (std::uint64_t s = 0; s < shots; ++s) {
        std::fill(key.begin(), key.end(), '0');
        for (std::size_t k = 0; k < n_assign; ++k) {
            const auto outcome = samples[k][s];
            const auto &qubits = layout.assignments[k].qubits;
            for (std::size_t b = 0; b < qubits.size(); ++b) {
                if (((outcome >> b) & 1U) != 0U) {
                    key[static_cast<std::size_t>(width - 1 - qubits[b])] = '1';
                }
            }
        }
        ++joint.counts[key];
    }
    return joint;
}

sim::CountsMap partial_measurement(const sim::CountsMap &counts, std::span<const int> qubits,
                                   bool zero_fill) {
    const int n = static_cast<int>(qubits.size());
    for (int q : qubits) {
        if (q < 0 || q >= counts.width) {
            throw UsageError("qubit " + std::to_string(q) + " is outside a " +
                             std::to_string(counts.width) + "-bit register");
        }
    }
    if (n < 1) {
        throw UsageError("empty measurement window");
    }
    if (zero_fill && n > 20) {
        throw UsageError("zero-filling a " + std::to_string(n) + "-bit marginal is too large");
    }
    sim::CountsMap out{n, counts.shots, {}};
    std::string sub(static_cast<std::size_t>(n), '0');
    for (const auto &[key, c] : counts.counts) {
        check_key(key, counts.width);
        for (int b = 0; b < n; ++b) {
            sub[static_cast<std::size_t>(n - 1 - b)] =
                key[static_cast<std::size_t>(counts.width - 1 - qubits[static_cast<std::size_t>(b)])];
        }
        out.counts[sub] += c;
    }
    if (zero_fill) {
        for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << static_cast<unsigned>(n)); ++idx) {
            out.counts.try_emplace(sim::to_bitstring(idx, n), 0);
        }
    }
    return out;
}

sim::CountsMap partial_measurement(const sim::CountsMap &counts, int least, int n,
                                   bool zero_fill) {
    if (least < 0 || n < 1 || least + n > counts.width) {
        throw UsageError("window [" + std::to_string(least) + ", " + std::to_string(least + n) +
                         ") is outside a " + std::to_string(counts.width) + "-bit register");
    }
    std::vector<int> qubits(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) {
        qubits[static_cast<std::size_t>(b)] = least + b;
    }
    return partial_measurement(counts, qubits, zero_fill);
}

Distribution to_distribution(const sim::CountsMap &counts) {
    if (counts.shots == 0) {
        throw UsageError("histogram has no shots");
    }
    Distribution out;
    for (const auto &[key, c] : counts.counts) {
        out[key] = static_cast<double>(c) / static_cast<double>(counts.shots);
    }
    return out;
}

Distribution exact_distribution(const sim::StateVector &state) {
    Distribution out;
    for (std::size_t i = 0; i < state.size(); ++i) {
        out[sim::to_bitstring(i, state.num_qubits())] = std::norm(state[i]);
    }
    return out;
}

double overlap_fidelity(const Distribution &p1, const Distribution &p2) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (const auto &kv : p1) {
        s1 += kv.second;
    }
    for (const auto &kv : p2) {
        s2 += kv.second;
    }
    if (!(s1 > 0.0) || !(s2 > 0.0)) {
        throw UsageError("distribution has no mass");
    }
    double acc = 0.0;
    for (const auto &[key, q] : p2) {
        const auto it = p1.find(key);
        if (it != p1.end()) {
            acc += std::sqrt(it->second * q);
        }
    }
    return (acc * acc) / (s1 * s2);
}

double result_fidelity(const Distribution &out, const Distribution &ideal,
                       std::uint64_t n_outcomes) {
    if (n_outcomes == 0 || n_outcomes < ideal.size() || n_outcomes < out.size()) {
        throw UsageError("outcome space is smaller than the distributions' support");
    }
    double total = 0.0;
    for (const auto &kv : ideal) {
        if (kv.second < 0.0) {
            throw UsageError("negative probability for '" + kv.first + "'");
        }
        total += kv.second;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw UsageError("ideal distribution sums to " + std::to_string(total));
    }
    Distribution uniform;
    const double u = 1.0 / static_cast<double>(n_outcomes);
    const std::size_t bits = ideal.empty() ? 0 : ideal.begin()->first.size();
    if (bits > 0 && bits < 21 && n_outcomes == (std::uint64_t{1} << bits)) {
        for (std::uint64_t idx = 0; idx < n_outcomes; ++idx) {
            uniform[sim::to_bitstring(idx, static_cast<int>(bits))] = u;
        }
    } else {
        for (const auto &kv : ideal) {
            uniform[kv.first] = u;
        }
        // Mass of the uniform distribution outside the ideal support.
        const double rest = 1.0 - u * static_cast<double>(ideal.size());
        if (rest > 0.0) {
            uniform[std::string(1, '\0')] = rest;
        }
    }
    const double f_uni = overlap_fidelity(uniform, ideal);
    if (f_uni >= 1.0 - 1e-12) {
        throw DegenerateError("result fidelity is undefined for a uniform ideal distribution");
    }
    const double f = overlap_fidelity(out, ideal);
    return std::clamp((f - f_uni) / (1.0 - f_uni), 0.0, 1.0);
}

CallAccounting qpu_calls(std::uint64_t n_train, std::uint64_t n_test, std::uint64_t p,
                         std::size_t trf) {
    if (trf == 0) {
        throw UsageError("trial reduction factor must be positive");
    }
    CallAccounting acc;
    acc.trf = trf;
    acc.serial = p * (n_train * (n_train - (n_train > 0 ? 1 : 0)) / 2 + n_test * n_train);
    acc.packed = (acc.serial + trf - 1) / trf;
    return acc;
}

QmpLayout load_layout(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open layout file " + path.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    QmpLayout layout;
    try {
        for (const auto &[key, _] : doc.items()) {
            if (key != "device_width" && key != "edges" && key != "buffer" &&
                key != "assignments" && key != "name") {
                throw ConfigError(path.string() + ": unknown key '" + key + "'");
            }
        }
        layout.device.width = doc.at("device_width").get<int>();
        if (doc.contains("edges")) {
            for (const auto &e : doc.at("edges")) {
                layout.device.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
            }
        }
        layout.buffer = doc.value("buffer", 1);
        for (const auto &a : doc.at("assignments")) {
            layout.assignments.push_back(
                {a.at("circuit").get<std::size_t>(), a.at("qubits").get<std::vector<int>>()});
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    if (layout.device.width < 1) {
        throw ConfigError(path.string() + ": device_width must be positive");
    }
    validate_layout(layout);
    return layout;
}

void save_layout(const QmpLayout &layout, const std::filesystem::path &path) {
    nlohmann::json doc;
    doc["device_width"] = layout.device.width;
    doc["buffer"] = layout.buffer;
    doc["edges"] = nlohmann::json::array();
    for (const auto &[a, b] : layout.device.edges) {
        doc["edges"].push_back({a, b});
    }
    doc["assignments"] = nlohmann::json::array();
    for (const auto &a : layout.assignments) {
        doc["assignments"].push_back({{"circuit", a.circuit}, {"qubits", a.qubits}});
    }
    std::ofstream out(path);
    if (!out) {
        throw IngestionError("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

void write_counts(const sim::CountsMap &counts, const std::filesystem::path &path) {
    nlohmann::json doc;
    doc["width"] = counts.width;
    doc["shots"] = counts.shots;
    doc["counts"] = counts.counts;
    std::ofstream out(path);
    if (!out) {
        throw IngestionError("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

sim::CountsMap read_counts(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open counts file " + path.string());
    }
    try {
        const auto doc = nlohmann::json::parse(in);
        sim::CountsMap counts{doc.at("width").get<int>(), doc.at("shots").get<std::uint64_t>(),
                              doc.at("counts").get<std::map<std::string, std::uint64_t>>()};
        std::uint64_t total = 0;
        for (const auto &[key, c] : counts.counts) {
            check_key(key, counts.width);
            total += c;
        }
        if (total != counts.shots) {
            throw ConfigError(path.string() + ": counts sum to " + std::to_string(total) +
                              ", shots is " + std::to_string(counts.shots));
        }
        return counts;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

} // namespace tshk::qmp
