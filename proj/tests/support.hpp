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


// Random inputs shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "tshk/ansatz.hpp"
#include "tshk/data.hpp"
#include "tshk/random.hpp"
#include "tshk/sim.hpp"

namespace testing_support {

inline std::vector<double> random_vector(tshk::Rng &rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto &x : v) {
        x = tshk::uniform(rng, lo, hi);
    }
    return v;
}

/// Random program over every gate kind with distinct qubits per gate.
inline tshk::sim::Program random_program(tshk::Rng &rng, int n, int length) {
    using namespace tshk::sim;
    Program prog;
    for (int g = 0; g < length; ++g) {
        const auto kind = tshk::uniform_index(rng, n > 1 ? 5 : 4);
        const int a = static_cast<int>(tshk::uniform_index(rng, static_cast<std::uint64_t>(n)));
        const double angle = tshk::uniform(rng, -std::numbers::pi, std::numbers::pi);
        switch (kind) {
        case 0:
            prog.push_back(rx(a, angle));
            break;
        case 1:
            prog.push_back(ry(a, angle));
            break;
        case 2:
            prog.push_back(rz(a, angle));
            break;
        case 3: {
            std::vector<int> support;
            for (int q = 0; q < n; ++q) {
                if (q == a || tshk::uniform01(rng) < 0.4) {
                    support.push_back(q);
                }
            }
            prog.push_back(zphase(support, angle));
            break;
        }
        default: {
            int b = static_cast<int>(tshk::uniform_index(rng, static_cast<std::uint64_t>(n - 1)));
            if (b >= a) {
                ++b;
            }
            prog.push_back(cx(a, b));
        }
        }
    }
    return prog;
}

/// QAOA spec with 1..max_qubits qubits, 1..3 features and small layer counts.
inline tshk::ansatz::AnsatzSpec random_spec(tshk::Rng &rng, int max_qubits, bool allow_ry = true) {
    tshk::ansatz::AnsatzSpec spec;
    spec.n_qubits = 1 + static_cast<int>(tshk::uniform_index(rng, static_cast<std::uint64_t>(max_qubits)));
    spec.n_features = 1 + static_cast<int>(tshk::uniform_index(rng, 3));
    spec.embedding = allow_ry && tshk::uniform01(rng) < 0.25 ? tshk::ansatz::Embedding::RyFixed
                                                             : tshk::ansatz::Embedding::Qaoa;
    if (spec.embedding == tshk::ansatz::Embedding::RyFixed) {
        spec.n_features = std::min(spec.n_features, spec.n_qubits);
    }
    spec.embed_layers = 1 + static_cast<int>(tshk::uniform_index(rng, 2));
    spec.sel_layers = 1 + static_cast<int>(tshk::uniform_index(rng, 2));
    spec.walsh_locality = 1 + static_cast<int>(tshk::uniform_index(rng, static_cast<std::uint64_t>(spec.n_qubits)));
    return spec;
}

/// Random instances with values in [0, pi] and alternating labels.
inline std::vector<tshk::data::Instance> random_instances(tshk::Rng &rng, int count, int p, int d) {
    std::vector<tshk::data::Instance> out;
    for (int i = 0; i < count; ++i) {
        tshk::data::Instance inst;
        inst.p = p;
        inst.d = d;
        inst.values = random_vector(rng, static_cast<std::size_t>(p * d), 0.0, std::numbers::pi);
        inst.label = i % 2 == 0 ? 1 : -1;
        out.push_back(std::move(inst));
    }
    return out;
}

inline std::vector<double> time_grid(int p) {
    std::vector<double> t(static_cast<std::size_t>(p));
    for (int l = 0; l < p; ++l) {
        t[static_cast<std::size_t>(l)] = p == 1 ? 1.0 : static_cast<double>(l) / (p - 1);
    }
    return t;
}

} // namespace testing_support
