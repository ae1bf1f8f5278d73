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
 * Dense complex statevector simulator.
 *
 * Bit ordering: qubit 0 is the least significant bit of the basis index and
 * the rightmost character of a measured bitstring.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tshk::sim {

using Complex = std::complex<double>;

/// Largest register the dense engine accepts (2^20 amplitudes, 16 MiB).
inline constexpr int kMaxQubits = 20;

enum class GateKind { RX, RY, RZ, CX, DiagZPhase };

/**
 * @brief One gate of a program.
 *
 * RX/RY/RZ act on `qubits[0]` as exp(-i angle P / 2). CX uses
 * `qubits[0]` as control and `qubits[1]` as target. DiagZPhase applies
 * exp(-i angle Z_S) with S = `qubits`, i.e. the phase
 * exp(-i angle prod_{j in S}(1 - 2 b_j)) on basis state b.
 *
 * `param` is the flat index of the trainable parameter this gate depends on
 * (-1 if none) and `param_scale` is d(angle)/d(parameter). Every
 * parameterized angle is linear in its parameter.
 */
struct GateOp {
    GateKind kind{GateKind::RX};
    std::vector<int> qubits;
    double angle{0.0};
    int param{-1};
    double param_scale{0.0};
};

using Program = std::vector<GateOp>;

GateOp rx(int q, double angle);
GateOp ry(int q, double angle);
GateOp rz(int q, double angle);
GateOp cx(int control, int target);
GateOp zphase(std::vector<int> support, double angle);

/// Inverse of a single gate: negated angle (and scale); CX is self-inverse.
GateOp inverse(const GateOp &gate);

/// Adjoint of a program: reversed gate order, each gate inverted.
Program adjoint(const Program &program);

/// Append `tail` to `head`.
void append(Program &head, const Program &tail);

class StateVector {
  public:
    /// |0...0> on `n_qubits` qubits. Throws ConfigError outside [1, kMaxQubits].
    static StateVector zero(int n_qubits);

    /// Computational basis state |index>.
    static StateVector basis(int n_qubits, std::uint64_t index);

    [[nodiscard]] int num_qubits() const { return num_qubits_; }
    [[nodiscard]] std::size_t size() const { return amplitudes_.size(); }
    [[nodiscard]] const std::vector<Complex> &amplitudes() const { return amplitudes_; }
    [[nodiscard]] Complex operator[](std::size_t i) const { return amplitudes_[i]; }

    /// In-place gate application. Throws UsageError on bad qubit indices.
    void apply(const GateOp &gate);
    void apply(const Program &program);

    [[nodiscard]] double norm_squared() const;

  private:
    StateVector(int n_qubits, std::vector<Complex> amplitudes)
        : num_qubits_{n_qubits}, amplitudes_{std::move(amplitudes)} {}

    int num_qubits_;
    std::vector<Complex> amplitudes_;
};

/// Measurement histogram. Keys are `width`-character bitstrings, qubit 0
/// rightmost; only observed keys need be present.
struct CountsMap {
    int width{0};
    std::uint64_t shots{0};
    std::map<std::string, std::uint64_t> counts;
};

StateVector new_zero_state(int n_qubits);
StateVector apply_gate(StateVector state, const GateOp &gate);
StateVector run(const Program &program, int n_qubits);

/// |amplitude[0]|^2.
double prob_all_zeros(const StateVector &state);

/// Per-shot basis-index outcomes drawn by inverse CDF from a
/// std::mt19937_64 engine seeded with `seed`. Throws UsageError if shots = 0.
std::vector<std::uint64_t> sample_shots(const StateVector &state, std::uint64_t shots,
                                        std::uint64_t seed);

/// Histogram of sample_shots.
CountsMap sample_counts(const StateVector &state, std::uint64_t shots, std::uint64_t seed);

/// `width`-character bitstring of `index`, qubit 0 rightmost.
std::string to_bitstring(std::uint64_t index, int width);

/// Inverse of to_bitstring. Throws UsageError on non-binary characters.
std::uint64_t from_bitstring(const std::string &bits);

} // namespace tshk::sim
