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
 * Parameterized circuit families for the time-series Hamiltonian kernel:
 * data embeddings U(x, alpha), the strongly-entangling eigenvector circuit
 * W(beta), the diagonal Walsh-series evolution D(gamma, t), and the kernel
 * circuit V_t^dag U(x')^dag U(x) V_t built from them.
 *
 * Trainable parameters are addressed by a flat index: alpha first, then
 * beta, then gamma.
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tshk/random.hpp"
#include "tshk/sim.hpp"

namespace tshk::ansatz {

enum class Embedding {
    RyFixed, ///< RY(x_j) on qubit j < d, identity elsewhere; no alpha.
    Qaoa     ///< data RZ phases, ZZ ring products, RX mixer per layer.
};

struct AnsatzSpec {
    int n_qubits{2};
    int n_features{1};
    Embedding embedding{Embedding::Qaoa};
    int embed_layers{1};
    int sel_layers{1};
    int walsh_locality{2};

    [[nodiscard]] std::size_t alpha_count() const;
    [[nodiscard]] std::size_t beta_count() const;
    [[nodiscard]] std::size_t gamma_count() const;
    [[nodiscard]] std::size_t parameter_count() const {
        return alpha_count() + beta_count() + gamma_count();
    }

    /// Throws ConfigError on out-of-range fields.
    void validate() const;

    /// Family label in the "QAOA-g-SEL-g" / "Ry-SEL-g" style.
    [[nodiscard]] std::string name() const;
};

/// Default Walsh truncation min(n, 2).
int default_walsh_locality(int n_qubits);

struct ParameterSet {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;

    /// Every entry drawn uniformly from [-pi, pi).
    static ParameterSet random(const AnsatzSpec &spec, Rng &rng);
    static ParameterSet zeros(const AnsatzSpec &spec);
    static ParameterSet from_flat(const AnsatzSpec &spec, std::span<const double> flat);

    [[nodiscard]] std::vector<double> flat() const;

    /// Throws UsageError if lengths do not match the spec.
    void check(const AnsatzSpec &spec) const;
};

/**
 * Nonempty qubit subsets of size <= locality, ordered by (size, lexicographic).
 * One gamma coefficient per subset.
 */
std::vector<std::vector<int>> zstring_basis(int n_qubits, int locality);

sim::Program build_embedding(const AnsatzSpec &spec, std::span<const double> x,
                             const ParameterSet &theta);

/// W(beta): per layer RZ.RY.RZ on each qubit, then a CX ring with range
/// r_k = (k mod (n-1)) + 1.
sim::Program build_eigenvector_circuit(const AnsatzSpec &spec, const ParameterSet &theta);

/// D(gamma, t) = exp(-i t sum_S gamma_S Z_S).
sim::Program build_diagonal(const AnsatzSpec &spec, const ParameterSet &theta, double t);

/// V_t = W^dag D(gamma, t) W, as a gate list applied W first.
sim::Program build_time_evolution(const AnsatzSpec &spec, const ParameterSet &theta, double t);

/// V_t, U(x), U(x')^dag, V_t^dag applied in that order to |0...0>; the
/// all-zeros probability of the result is the fidelity kernel.
sim::Program build_kernel_circuit(const AnsatzSpec &spec, std::span<const double> x,
                                  std::span<const double> x_prime, const ParameterSet &theta,
                                  double t);

/// One parameter-shift evaluation pair: the derivative contribution of the
/// occurrence at `site` is coefficient * (f(angle + shift) - f(angle - shift)).
struct ShiftTerm {
    std::size_t site{0};
    double shift{0.0};
    double coefficient{0.0};
};

/**
 * Shift-rule terms for every occurrence of flat parameter `param` in
 * `program`. Rotations shift by pi/2 with coefficient scale/2; DiagZPhase,
 * written exp(-i angle Z_S), shifts its angle by pi/4 (pi/2 on the doubled
 * rotation angle) with coefficient scale. `scale` is the gate's
 * d(angle)/d(parameter), which carries factors such as t for gamma and the
 * data values for embedding angles.
 *
 * Throws UsageError if `param` is negative or >= `n_params`.
 */
std::vector<ShiftTerm> shift_rule_tangents(const sim::Program &program, int param,
                                           std::size_t n_params);

/// d prob_all_zeros / d theta[param] by direct evaluation of every shifted circuit.
double shift_rule_derivative(const sim::Program &program, int n_qubits, int param,
                             std::size_t n_params);

/// prob_all_zeros of the program together with its full shift-rule gradient.
struct ValueAndGradient {
    double value{0.0};
    std::vector<double> gradient;
};

/**
 * All shift-rule derivatives of prob_all_zeros in one sweep. Forward states
 * and backward projections onto <0| are cached so each shifted evaluation
 * costs a single gate application and inner product; the shifted values are
 * exactly those of shift_rule_derivative.
 */
ValueAndGradient prob_zero_gradient(const sim::Program &program, int n_qubits,
                                    std::size_t n_params);

} // namespace tshk::ansatz
