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
#include "tshk/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tshk/error.hpp"

namespace tshk::ansatz {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t binomial(int n, int k) {
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    }
    return r;
}

sim::GateOp bind(sim::GateOp gate, std::size_t param, double scale) {
    gate.param = static_cast<int>(param);
    gate.param_scale = scale;
    return gate;
}

void check_features(const AnsatzSpec &spec, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(spec.n_features)) {
        throw UsageError("feature vector has " + std::to_string(x.size()) +
                         " entries, ansatz expects " + std::to_string(spec.n_features));
    }
}

} // namespace

std::size_t AnsatzSpec::alpha_count() const {
    if (embedding == Embedding::RyFixed) {
        return 0;
    }
    return 3 * static_cast<std::size_t>(n_qubits) * static_cast<std::size_t>(embed_layers);
}

std::size_t AnsatzSpec::beta_count() const {
    return 3 * static_cast<std::size_t>(n_qubits) * static_cast<std::size_t>(sel_layers);
}

std::size_t AnsatzSpec::gamma_count() const {
    std::size_t total = 0;
    for (int m = 1; m <= walsh_locality; ++m) {
        total += binomial(n_qubits, m);
    }
    return total;
}

void AnsatzSpec::validate() const {
    if (n_qubits < 1 || n_qubits > sim::kMaxQubits) {
        throw ConfigError("ansatz.n_qubits must lie in [1, " + std::to_string(sim::kMaxQubits) +
                          "]");
    }
    if (n_features < 1) {
        throw ConfigError("ansatz.n_features must be positive");
    }
    if (embedding == Embedding::RyFixed && n_features > n_qubits) {
        throw ConfigError("Ry embedding needs n_features <= n_qubits");
    }
    if (embedding == Embedding::Qaoa && embed_layers < 1) {
        throw ConfigError("ansatz.embed_layers must be positive for the QAOA embedding");
    }
    if (sel_layers < 1) {
        throw ConfigError("ansatz.sel_layers must be positive");
    }
    if (walsh_locality < 1 || walsh_locality > n_qubits) {
        throw ConfigError("ansatz.walsh_locality must lie in [1, n_qubits]");
    }
}

std::string AnsatzSpec::name() const {
    const std::string sel = "SEL-" + std::to_string(sel_layers);
    if (embedding == Embedding::RyFixed) {
        return "Ry-" + sel;
    }
    return "QAOA-" + std::to_string(embed_layers) + "-" + sel;
}

int default_walsh_locality(int n_qubits) { return std::min(n_qubits, 2); }

ParameterSet ParameterSet::random(const AnsatzSpec &spec, Rng &rng) {
    ParameterSet theta = zeros(spec);
    for (auto *vec : {&theta.alpha, &theta.beta, &theta.gamma}) {
        for (auto &v : *vec) {
            v = uniform(rng, -kPi, kPi);
        }
    }
    return theta;
}

ParameterSet ParameterSet::zeros(const AnsatzSpec &spec) {
    return {std::vector<double>(spec.alpha_count(), 0.0),
            std::vector<double>(spec.beta_count(), 0.0),
            std::vector<double>(spec.gamma_count(), 0.0)};
}

ParameterSet ParameterSet::from_flat(const AnsatzSpec &spec, std::span<const double> flat) {
    if (flat.size() != spec.parameter_count()) {
        throw UsageError("flat parameter vector has " + std::to_string(flat.size()) +
                         " entries, expected " + std::to_string(spec.parameter_count()));
    }
    const auto a = spec.alpha_count();
    const auto b = spec.beta_count();
    ParameterSet theta;
    theta.alpha.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(a));
    theta.beta.assign(flat.begin() + static_cast<std::ptrdiff_t>(a),
                      flat.begin() + static_cast<std::ptrdiff_t>(a + b));
    theta.gamma.assign(flat.begin() + static_cast<std::ptrdiff_t>(a + b), flat.end());
    return theta;
}

std::vector<double> ParameterSet::flat() const {
    std::vector<double> out;
    out.reserve(alpha.size() + beta.size() + gamma.size());
    out.insert(out.end(), alpha.begin(), alpha.end());
    out.insert(out.end(), beta.begin(), beta.end());
    out.insert(out.end(), gamma.begin(), gamma.end());
    return out;
}

void ParameterSet::check(const AnsatzSpec &spec) const {
    if (alpha.size() != spec.alpha_count() || beta.size() != spec.beta_count() ||
        gamma.size() != spec.gamma_count()) {
        throw UsageError("parameter set sizes (" + std::to_string(alpha.size()) + ", " +
                         std::to_string(beta.size()) + ", " + std::to_string(gamma.size()) +
                         ") do not match " + spec.name() + " (" +
                         std::to_string(spec.alpha_count()) + ", " +
                         std::to_string(spec.beta_count()) + ", " +
                         std::to_string(spec.gamma_count()) + ")");
    }
}

std::vector<std::vector<int>> zstring_basis(int n_qubits, int locality) {
    std::vector<std::vector<int>> basis;
    for (int size = 1; size <= locality; ++size) {
        // Lexicographic enumeration of size-element combinations.
        std::vector<int> comb(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i) {
            comb[static_cast<std::size_t>(i)] = i;
        }
        while (true) {
            basis.push_back(comb);
            int i = size - 1;
            while (i >= 0 && comb[static_cast<std::size_t>(i)] == n_qubits - size + i) {
                --i;
            }
            if (i < 0) {
                break;
            }
            ++comb[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < size; ++j) {
                comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
            }
        }
    }
    return basis;
}

sim::Program build_embedding(const AnsatzSpec &spec, std::span<const double> x,
                             const ParameterSet &theta) {
    check_features(spec, x);
    theta.check(spec);
    const int n = spec.n_qubits;
    sim::Program program;
    if (spec.embedding == Embedding::RyFixed) {
        for (int j = 0; j < spec.n_features; ++j) {
            program.push_back(sim::ry(j, x[static_cast<std::size_t>(j)]));
        }
        return program;
    }
    const auto d = static_cast<std::size_t>(spec.n_features);
    auto feature = [&](int j) { return x[static_cast<std::size_t>(j) % d]; };
    const auto per_layer = 3 * static_cast<std::size_t>(n);
    for (int k = 0; k < spec.embed_layers; ++k) {
        const std::size_t base = static_cast<std::size_t>(k) * per_layer;
        for (int j = 0; j < n; ++j) {
            const std::size_t p = base + static_cast<std::size_t>(j);
            program.push_back(bind(sim::rz(j, theta.alpha[p] * feature(j)), p, feature(j)));
        }
        if (n > 1) {
            for (int j = 0; j < n; ++j) {
                const int next = (j + 1) % n;
                const std::size_t p = base + static_cast<std::size_t>(n + j);
                const double scale = feature(j) * feature(next);
                program.push_back(bind(sim::zphase({j, next}, theta.alpha[p] * scale), p, scale));
            }
        }
        for (int j = 0; j < n; ++j) {
            const std::size_t p = base + static_cast<std::size_t>(2 * n + j);
            program.push_back(bind(sim::rx(j, theta.alpha[p]), p, 1.0));
        }
    }
    return program;
}

sim::Program build_eigenvector_circuit(const AnsatzSpec &spec, const ParameterSet &theta) {
    theta.check(spec);
    const int n = spec.n_qubits;
    const std::size_t offset = spec.alpha_count();
    sim::Program program;
    for (int k = 0; k < spec.sel_layers; ++k) {
        for (int j = 0; j < n; ++j) {
            const std::size_t b = 3 * (static_cast<std::size_t>(k) * static_cast<std::size_t>(n) +
                                       static_cast<std::size_t>(j));
            program.push_back(bind(sim::rz(j, theta.beta[b]), offset + b, 1.0));
            program.push_back(bind(sim::ry(j, theta.beta[b + 1]), offset + b + 1, 1.0));
            program.push_back(bind(sim::rz(j, theta.beta[b + 2]), offset + b + 2, 1.0));
        }
        if (n > 1) {
            const int range = (k % (n - 1)) + 1;
            for (int j = 0; j < n; ++j) {
                program.push_back(sim::cx(j, (j + range) % n));
            }
        }
    }
    return program;
}

sim::Program build_diagonal(const AnsatzSpec &spec, const ParameterSet &theta, double t) {
    theta.check(spec);
    const auto basis = zstring_basis(spec.n_qubits, spec.walsh_locality);
    const std::size_t offset = spec.alpha_count() + spec.beta_count();
    sim::Program program;
    program.reserve(basis.size());
    for (std::size_t s = 0; s < basis.size(); ++s) {
        program.push_back(bind(sim::zphase(basis[s], t * theta.gamma[s]), offset + s, t));
    }
    return program;
}

sim::Program build_time_evolution(const AnsatzSpec &spec, const ParameterSet &theta, double t) {
    const auto w = build_eigenvector_circuit(spec, theta);
    sim::Program program = w;
    sim::append(program, build_diagonal(spec, theta, t));
    sim::append(program, sim::adjoint(w));
    return program;
}

sim::Program build_kernel_circuit(const AnsatzSpec &spec, std::span<const double> x,
                                  std::span<const double> x_prime, const ParameterSet &theta,
                                  double t) {
    const auto v = build_time_evolution(spec, theta, t);
    sim::Program program = v;
    sim::append(program, build_embedding(spec, x, theta));
    sim::append(program, sim::adjoint(build_embedding(spec, x_prime, theta)));
    sim::append(program, sim::adjoint(v));
    return program;
}

std::vector<ShiftTerm> shift_rule_tangents(const sim::Program &program, int param,
                                           std::size_t n_params) {
    if (param < 0 || static_cast<std::size_t>(param) >= n_params) {
        throw UsageError("unknown parameter index " + std::to_string(param));
    }
    std::vector<ShiftTerm> terms;
    for (std::size_t site = 0; site < program.size(); ++site) {
        const auto &gate = program[site];
        if (gate.param != param) {
            continue;
        }
        if (gate.kind == sim::GateKind::DiagZPhase) {
            terms.push_back({site, kPi / 4, gate.param_scale});
        } else {
            terms.push_back({site, kPi / 2, gate.param_scale / 2});
        }
    }
    return terms;
}

double shift_rule_derivative(const sim::Program &program, int n_qubits, int param,
                             std::size_t n_params) {
    double derivative = 0.0;
    for (const auto &term : shift_rule_tangents(program, param, n_params)) {
        sim::Program shifted = program;
        shifted[term.site].angle += term.shift;
        const double plus = sim::prob_all_zeros(sim::run(shifted, n_qubits));
        shifted[term.site].angle -= 2 * term.shift;
        const double minus = sim::prob_all_zeros(sim::run(shifted, n_qubits));
        derivative += term.coefficient * (plus - minus);
    }
    return derivative;
}

ValueAndGradient prob_zero_gradient(const sim::Program &program, int n_qubits,
                                    std::size_t n_params) {
    ValueAndGradient out;
    out.gradient.assign(n_params, 0.0);

    std::vector<sim::StateVector> forward;
    forward.reserve(program.size());
    auto state = sim::StateVector::zero(n_qubits);
    for (const auto &gate : program) {
        forward.push_back(state);
        state.apply(gate);
    }
    out.value = sim::prob_all_zeros(state);

    // `bra` holds (G_{m-1} ... G_{k+1})^dag |0>, so that
    // <0| G_{m-1} ... G_0 |0> = <bra | G_k forward[k]>.
    auto bra = sim::StateVector::zero(n_qubits);
    auto overlap = [](const sim::StateVector &a, const sim::StateVector &b) {
        sim::Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < a.size(); ++i) {
            acc += std::conj(a[i]) * b[i];
        }
        return std::norm(acc);
    };
    for (std::size_t k = program.size(); k-- > 0;) {
        const auto &gate = program[k];
        if (gate.param >= 0) {
            if (static_cast<std::size_t>(gate.param) >= n_params) {
                throw UsageError("program references parameter " + std::to_string(gate.param) +
                                 " beyond the " + std::to_string(n_params) + " declared");
            }
            const bool diag = gate.kind == sim::GateKind::DiagZPhase;
            const double shift = diag ? kPi / 4 : kPi / 2;
            const double coefficient = diag ? gate.param_scale : gate.param_scale / 2;
            sim::GateOp shifted = gate;
            shifted.angle = gate.angle + shift;
            auto plus = forward[k];
            plus.apply(shifted);
            shifted.angle = gate.angle - shift;
            auto minus = forward[k];
            minus.apply(shifted);
            out.gradient[static_cast<std::size_t>(gate.param)] +=
                coefficient * (overlap(bra, plus) - overlap(bra, minus));
        }
        bra.apply(sim::inverse(gate));
    }
    return out;
}

} // namespace tshk::ansatz
