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
#include "tshk/timeprobe.hpp"

#include <fstream>
#include <iomanip>

#include "tshk/error.hpp"
#include "tshk/parallel.hpp"

namespace tshk::timeprobe {

std::vector<double> overlap(const ansatz::AnsatzSpec &spec, const ansatz::ParameterSet &theta,
                            std::span<const double> deltas, int threads) {
    spec.validate();
    theta.check(spec);
    std::vector<double> out(deltas.size());
    parallel_for(deltas.size(), threads, [&](std::size_t k) {
        const auto program = ansatz::build_time_evolution(spec, theta, deltas[k]);
        out[k] = sim::prob_all_zeros(sim::run(program, spec.n_qubits));
    });
    return out;
}

ProbeResult probe(const ansatz::AnsatzSpec &spec, const ansatz::ParameterSet &theta,
                  std::span<const double> deltas, std::span<const double> marker_times,
                  int threads) {
    ProbeResult r;
    r.deltas.assign(deltas.begin(), deltas.end());
    r.values = overlap(spec, theta, deltas, threads);
    r.marker_times.assign(marker_times.begin(), marker_times.end());
    r.marker_values = overlap(spec, theta, marker_times, threads);
    return r;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) {
        throw ConfigError("probe grid needs at least one point");
    }
    if (n == 1) {
        return {lo};
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
    }
    return out;
}

void write_probe_csv(const ProbeResult &result, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw IngestionError("cannot write " + path.string());
    }
    out << std::setprecision(17) << "kind,delta_t,overlap\n";
    for (std::size_t k = 0; k < result.deltas.size(); ++k) {
        out << "curve," << result.deltas[k] << ',' << result.values[k] << '\n';
    }
    for (std::size_t k = 0; k < result.marker_times.size(); ++k) {
        out << "marker," << result.marker_times[k] << ',' << result.marker_values[k] << '\n';
    }
}

} // namespace tshk::timeprobe
