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
 * Multi-programming: many small circuits packed onto disjoint windows of one
 * wide device, a joint measurement synthesized from the independent
 * per-circuit samples, window marginals and result-fidelity scoring.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tshk/sim.hpp"

namespace tshk::qmp {

/// Coupling graph. With no edges the device is a line 0-1-...-(width-1).
struct Device {
    int width{0};
    std::vector<std::pair<int, int>> edges;

    static Device line(int width);
    [[nodiscard]] std::vector<std::vector<int>> adjacency() const;
};

/// Circuit `circuit` runs with logical qubit k on physical qubit qubits[k].
struct Assignment {
    std::size_t circuit{0};
    std::vector<int> qubits;
};

struct QmpLayout {
    Device device;
    int buffer{1}; ///< minimum idle qubits on any device path between two windows
    std::vector<Assignment> assignments;

    [[nodiscard]] int device_width() const { return device.width; }
    [[nodiscard]] std::size_t active_qubits() const;
};

/**
 * Throws CapacityError unless every window is in range, internally
 * connected, disjoint from the others and more than `buffer` edges away from
 * every other window.
 */
void validate_layout(const QmpLayout &layout);

/**
 * Greedy placement of up to `max_circuits` windows of `circuit_width` qubits.
 * Candidate windows are consecutive runs of a depth-first ordering of the
 * device (the identity on a line); a run is taken when it is connected, free
 * and respects the buffer. Throws CapacityError if nothing fits.
 */
QmpLayout pack(int circuit_width, const Device &device, int buffer = 1,
               std::size_t max_circuits = SIZE_MAX);

/// Circuits packed per joint run.
std::size_t trf(const QmpLayout &layout);

/// Sampling seed for circuit c, shared by serial and packed runs.
std::uint64_t circuit_seed(std::uint64_t seed, std::size_t circuit);

/// Per-shot outcomes of one circuit, optionally with independent bit flips
/// of probability `flip_prob` on every measured qubit.
std::vector<std::uint64_t> sample_circuit(const sim::Program &program, int n_qubits,
                                          std::uint64_t shots, std::uint64_t seed,
                                          double flip_prob = 0.0);

/// Histogram of one circuit run alone with circuit_seed(seed, c).
sim::CountsMap run_serial(const sim::Program &program, int n_qubits, std::uint64_t shots,
                          std::uint64_t seed, std::size_t circuit, double flip_prob = 0.0);

/**
 * Joint device-width histogram. Each assigned circuit is sampled with
 * circuit_seed(seed, circuit) and its bits are written at its physical
 * qubits; idle and buffer qubits read '0'. Only observed keys are stored.
 */
sim::CountsMap run_packed(const QmpLayout &layout, std::span<const sim::Program> circuits,
                          int circuit_width, std::uint64_t shots, std::uint64_t seed,
                          double flip_prob = 0.0, int threads = 1);

/**
 * Marginal over qubits least..least+n-1 (qubit 0 rightmost). Cost is linear
 * in the number of observed keys; with `zero_fill` all 2^n keys are present.
 * Throws UsageError for an out-of-range window.
 */
sim::CountsMap partial_measurement(const sim::CountsMap &counts, int least, int n,
                                   bool zero_fill = true);

/// Marginal over an arbitrary ordered qubit list; qubits[0] becomes the
/// rightmost character.
sim::CountsMap partial_measurement(const sim::CountsMap &counts, std::span<const int> qubits,
                                   bool zero_fill = true);

using Distribution = std::map<std::string, double>;

Distribution to_distribution(const sim::CountsMap &counts);

/// Exact outcome probabilities of a state, keyed like CountsMap.
Distribution exact_distribution(const sim::StateVector &state);

/// (sum_j sqrt(P1(j) P2(j)))^2 with both inputs normalized.
double overlap_fidelity(const Distribution &p1, const Distribution &p2);

/**
 * max((f(out, ideal) - f(uni, ideal)) / (1 - f(uni, ideal)), 0) with uni the
 * uniform distribution over `n_outcomes`. Throws DegenerateError when the
 * ideal distribution is itself uniform and UsageError when it is not
 * normalized within 1e-9.
 */
double result_fidelity(const Distribution &out, const Distribution &ideal,
                       std::uint64_t n_outcomes);

struct CallAccounting {
    std::uint64_t serial{0};
    std::uint64_t packed{0};
    std::size_t trf{1};
};

/// Circuit executions for a p-slice training Gram (upper triangle) plus an
/// M x N test block, serially and packed `trf` at a time.
CallAccounting qpu_calls(std::uint64_t n_train, std::uint64_t n_test, std::uint64_t p,
                         std::size_t trf);

/// JSON {device_width, edges, buffer, assignments: [{circuit, qubits}]}.
QmpLayout load_layout(const std::filesystem::path &path);
void save_layout(const QmpLayout &layout, const std::filesystem::path &path);

/// JSON {width, shots, counts: {bitstring: count}}.
void write_counts(const sim::CountsMap &counts, const std::filesystem::path &path);
sim::CountsMap read_counts(const std::filesystem::path &path);

} // namespace tshk::qmp
