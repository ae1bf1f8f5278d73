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
#include "tshk/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "tshk/error.hpp"
#include "tshk/random.hpp"

namespace tshk::sim {

namespace {

void check_qubits(const GateOp &gate, int n_qubits) {
    const std::size_t expected = gate.kind == GateKind::CX ? 2U : 1U;
    if (gate.kind == GateKind::DiagZPhase) {
        if (gate.qubits.empty()) {
            throw UsageError("DiagZPhase requires a nonempty support");
        }
    } else if (gate.qubits.size() != expected) {
        throw UsageError("gate has " + std::to_string(gate.qubits.size()) +
                         " target(s), expected " + std::to_string(expected));
    }
    std::uint64_t seen = 0;
    for (int q : gate.qubits) {
        if (q < 0 || q >= n_qubits) {
            throw UsageError("qubit index " + std::to_string(q) + " out of range for " +
                             std::to_string(n_qubits) + " qubits");
        }
        const std::uint64_t bit = 1ULL << static_cast<unsigned>(q);
        if ((seen & bit) != 0U) {
            throw UsageError("repeated qubit index " + std::to_string(q));
        }
        seen |= bit;
    }
}

/// Apply a 2x2 matrix [[m00, m01], [m10, m11]] to qubit q.
void apply_one_qubit(std::vector<Complex> &amps, int q, Complex m00, Complex m01, Complex m10,
                     Complex m11) {
    const std::size_t stride = std::size_t{1} << static_cast<unsigned>(q);
    const std::size_t dim = amps.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a0 = amps[i];
            const Complex a1 = amps[i + stride];
            amps[i] = m00 * a0 + m01 * a1;
            amps[i + stride] = m10 * a0 + m11 * a1;
        }
    }
}

} // namespace

GateOp rx(int q, double angle) { return {GateKind::RX, {q}, angle, -1, 0.0}; }
GateOp ry(int q, double angle) { return {GateKind::RY, {q}, angle, -1, 0.0}; }
GateOp rz(int q, double angle) { return {GateKind::RZ, {q}, angle, -1, 0.0}; }
GateOp cx(int control, int target) { return {GateKind::CX, {control, target}, 0.0, -1, 0.0}; }
GateOp zphase(std::vector<int> support, double angle) {
    return {GateKind::DiagZPhase, std::move(support), angle, -1, 0.0};
}

GateOp inverse(const GateOp &gate) {
    GateOp inv = gate;
    if (gate.kind != GateKind::CX) {
        inv.angle = -gate.angle;
        inv.param_scale = -gate.param_scale;
    }
    return inv;
}

Program adjoint(const Program &program) {
    Program out;
    out.reserve(program.size());
    for (auto it = program.rbegin(); it != program.rend(); ++it) {
        out.push_back(inverse(*it));
    }
    return out;
}

void append(Program &head, const Program &tail) {
    head.insert(head.end(), tail.begin(), tail.end());
}

StateVector StateVector::zero(int n_qubits) {
    return basis(n_qubits, 0);
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ConfigError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                          std::to_string(kMaxQubits) + "]");
    }
    const std::size_t dim = std::size_t{1} << static_cast<unsigned>(n_qubits);
    if (index >= dim) {
        throw UsageError("basis index out of range");
    }
    std::vector<Complex> amps(dim, Complex{0.0, 0.0});
    amps[index] = Complex{1.0, 0.0};
    return {n_qubits, std::move(amps)};
}

void StateVector::apply(const GateOp &gate) {
    check_qubits(gate, num_qubits_);
    switch (gate.kind) {
    case GateKind::RX: {
        const double c = std::cos(gate.angle / 2);
        const double s = std::sin(gate.angle / 2);
        apply_one_qubit(amplitudes_, gate.qubits[0], {c, 0}, {0, -s}, {0, -s}, {c, 0});
        break;
    }
    case GateKind::RY: {
        const double c = std::cos(gate.angle / 2);
        const double s = std::sin(gate.angle / 2);
        apply_one_qubit(amplitudes_, gate.qubits[0], {c, 0}, {-s, 0}, {s, 0}, {c, 0});
        break;
    }
    case GateKind::RZ: {
        const Complex lo = std::polar(1.0, -gate.angle / 2);
        const Complex hi = std::polar(1.0, gate.angle / 2);
        const std::size_t mask = std::size_t{1} << static_cast<unsigned>(gate.qubits[0]);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            amplitudes_[i] *= (i & mask) != 0U ? hi : lo;
        }
        break;
    }
    case GateKind::CX: {
        const std::size_t cmask = std::size_t{1} << static_cast<unsigned>(gate.qubits[0]);
        const std::size_t tmask = std::size_t{1} << static_cast<unsigned>(gate.qubits[1]);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & cmask) != 0U && (i & tmask) == 0U) {
                std::swap(amplitudes_[i], amplitudes_[i | tmask]);
            }
        }
        break;
    }
    case GateKind::DiagZPhase: {
        std::size_t mask = 0;
        for (int q : gate.qubits) {
            mask |= std::size_t{1} << static_cast<unsigned>(q);
        }
        // Z_S eigenvalue is +1 for even parity of the support bits, -1 for odd.
        const Complex even = std::polar(1.0, -gate.angle);
        const Complex odd = std::polar(1.0, gate.angle);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            amplitudes_[i] *= (std::popcount(i & mask) & 1) != 0 ? odd : even;
        }
        break;
    }
    }
}

void StateVector::apply(const Program &program) {
    for (const auto &gate : program) {
        apply(gate);
    }
}

double StateVector::norm_squared() const {
    return std::accumulate(amplitudes_.begin(), amplitudes_.end(), 0.0,
                           [](double acc, Complex a) { return acc + std::norm(a); });
}

StateVector new_zero_state(int n_qubits) { return StateVector::zero(n_qubits); }

StateVector apply_gate(StateVector state, const GateOp &gate) {
    state.apply(gate);
    return state;
}

StateVector run(const Program &program, int n_qubits) {
    auto state = StateVector::zero(n_qubits);
    state.apply(program);
    return state;
}

double prob_all_zeros(const StateVector &state) { return std::norm(state[0]); }

std::vector<std::uint64_t> sample_shots(const StateVector &state, std::uint64_t shots,
                                        std::uint64_t seed) {
    if (shots == 0) {
        throw UsageError("shots must be positive");
    }
    std::vector<double> cdf(state.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        acc += std::norm(state[i]);
        cdf[i] = acc;
    }
    // Absorb rounding in the normalization so every draw lands in range.
    const double total = acc;
    Rng rng(seed);
    std::vector<std::uint64_t> out(shots);
    for (auto &outcome : out) {
        const double u = uniform01(rng) * total;
        // upper_bound never lands on a zero-probability entry.
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) {
            --it;
        }
        outcome = static_cast<std::uint64_t>(it - cdf.begin());
    }
    return out;
}

CountsMap sample_counts(const StateVector &state, std::uint64_t shots, std::uint64_t seed) {
    const auto outcomes = sample_shots(state, shots, seed);
    std::vector<std::uint64_t> hist(state.size(), 0);
    for (auto o : outcomes) {
        ++hist[o];
    }
    CountsMap counts{state.num_qubits(), shots, {}};
    for (std::size_t i = 0; i < hist.size(); ++i) {
        if (hist[i] > 0) {
            counts.counts.emplace(to_bitstring(i, state.num_qubits()), hist[i]);
        }
    }
    return counts;
}

std::string to_bitstring(std::uint64_t index, int width) {
    std::string bits(static_cast<std::size_t>(width), '0');
    for (int q = 0; q < width; ++q) {
        if (((index >> static_cast<unsigned>(q)) & 1U) != 0U) {
            bits[static_cast<std::size_t>(width - 1 - q)] = '1';
        }
    }
    return bits;
}

std::uint64_t from_bitstring(const std::string &bits) {
    if (bits.size() > 64) {
        throw UsageError("bitstring longer than 64 characters");
    }
    std::uint64_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw UsageError("non-binary character in bitstring '" + bits + "'");
        }
        index = (index << 1U) | static_cast<std::uint64_t>(c == '1');
    }
    return index;
}

} // namespace tshk::sim
