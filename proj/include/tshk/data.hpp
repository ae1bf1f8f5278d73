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
 * Labeled time-series datasets: synthetic generators, UCR text ingestion,
 * decimation, per-feature scaling and CSV export.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tshk::data {

/// One labeled series: `p` observations of `d` features, stored row-major.
struct Instance {
    std::vector<double> values;
    int p{0};
    int d{0};
    int label{1}; ///< +1 or -1

    /// Feature vector observed at time index l.
    [[nodiscard]] std::span<const double> at(int l) const {
        return {values.data() + static_cast<std::size_t>(l) * static_cast<std::size_t>(d),
                static_cast<std::size_t>(d)};
    }
};

struct Dataset {
    std::string name;
    std::vector<Instance> instances;
    std::vector<double> times; ///< strictly increasing, length p
    int d{0};
    std::uint64_t seed{0};

    [[nodiscard]] int p() const { return static_cast<int>(times.size()); }
    [[nodiscard]] std::size_t size() const { return instances.size(); }
    [[nodiscard]] std::vector<int> labels() const;

    /// Throws UsageError on shape mismatches, non-finite values, bad labels
    /// or a non-increasing time grid.
    void validate() const;

    [[nodiscard]] bool has_both_classes() const;
};

/**
 * Moons-to-circles interpolation. Instance endpoints come from the two
 * interleaving half circles (offset (1, 0.5)) and from concentric circles of
 * radii 1.0 (class -1) and 0.5 (class +1), each with Gaussian noise
 * `noise_std`. Within each class the endpoints are angle-sorted and paired
 * by index; slice l is (1 - s_l) m + s_l c with s_l = l / (p - 1).
 */
Dataset gen_moons2circles(int n_instances, int p, double noise_std, std::uint64_t seed);

/// Two instances, -sin(t) labelled +1 and -cos(t) labelled -1, on p
/// uniform points of [0, t_max].
Dataset gen_sincos(int p, std::uint64_t seed, double t_max = 3.14159265358979323846);

/**
 * Read a UCR text file: one instance per line, class label first, then the
 * series values, separated by tabs or commas (detected per file). Labels
 * 1 -> +1 and 2 -> -1. Times are l / p for l = 1..p.
 */
Dataset load_ucr_file(const std::filesystem::path &path);
std::pair<Dataset, Dataset> load_ucr(const std::filesystem::path &train_path,
                                     const std::filesystem::path &test_path);

/// Write a univariate dataset in UCR tab-separated form.
void save_ucr(const Dataset &ds, const std::filesystem::path &path);

/// Keep time indices 0, factor, 2 factor, ...
Dataset decimate(const Dataset &ds, int factor);

/// Per-feature affine map v -> scale * v + offset.
struct Scaler {
    std::vector<double> scale;
    std::vector<double> offset;
    std::vector<int> degenerate_dims; ///< dims with max == min, mapped to the range midpoint
};

Scaler fit_scaler(const Dataset &train, double range_lo, double range_hi);

/// Values outside the fitted range are mapped affinely and not clipped.
Dataset apply_scaler(const Dataset &ds, const Scaler &scaler);

/// CSV with header `label,t1_f1,...,tp_fd`.
void write_csv(const Dataset &ds, const std::filesystem::path &path);

/// Manifest JSON {name, n, p, d, times, seed}.
void write_manifest(const Dataset &ds, const std::filesystem::path &path);

/// Inverse of write_csv + write_manifest.
Dataset read_csv(const std::filesystem::path &csv_path,
                 const std::filesystem::path &manifest_path);

} // namespace tshk::data
