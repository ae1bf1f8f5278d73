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
 * Embedding-overlap probe F(dt) = |<0|V_dt|0>|^2, which measures how far the
 * learned evolution moves the reference state over a time offset dt.
 */
#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "tshk/ansatz.hpp"

namespace tshk::timeprobe {

struct ProbeResult {
    std::vector<double> deltas;
    std::vector<double> values;
    std::vector<double> marker_times;  ///< training time grid
    std::vector<double> marker_values; ///< probe evaluated at marker_times
};

/// Overlap for each offset. Only the beta and gamma blocks of `theta` are used.
std::vector<double> overlap(const ansatz::AnsatzSpec &spec, const ansatz::ParameterSet &theta,
                            std::span<const double> deltas, int threads = 1);

/// Probe on `deltas` plus markers at `marker_times`.
ProbeResult probe(const ansatz::AnsatzSpec &spec, const ansatz::ParameterSet &theta,
                  std::span<const double> deltas, std::span<const double> marker_times = {},
                  int threads = 1);

/// `n` evenly spaced offsets from `lo` to `hi` inclusive.
std::vector<double> linspace(double lo, double hi, int n);

/// CSV with columns kind,delta_t,overlap (kind is "curve" or "marker").
void write_probe_csv(const ProbeResult &result, const std::filesystem::path &path);

} // namespace tshk::timeprobe
