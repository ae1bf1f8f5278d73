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


#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "tshk/data.hpp"
#include "tshk/error.hpp"

using namespace tshk;
using namespace tshk::data;
using std::numbers::pi;

namespace {

std::filesystem::path write_text(const std::string &name, const std::string &text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path;
}

std::filesystem::path gunpoint(const char *split) {
    return std::filesystem::path(TSHK_SOURCE_DIR) / "data" / "GunPoint" /
           (std::string("GunPoint_") + split + ".tsv");
}

} // namespace

TEST_CASE("moons2circles shape and balance") {
    const auto ds = gen_moons2circles(100, 10, 0.05, 1);
    CHECK(ds.size() == 100);
    CHECK(ds.p() == 10);
    CHECK(ds.d == 2);
    CHECK_NOTHROW(ds.validate());
    int pos = 0;
    for (int y : ds.labels()) {
        pos += y == 1 ? 1 : 0;
    }
    CHECK(pos == 50);
    CHECK(ds.times.front() == 0.0);
    CHECK(ds.times.back() == 1.0);
    CHECK_THROWS_AS(gen_moons2circles(99, 10, 0.05, 1), UsageError);
    CHECK_THROWS_AS(gen_moons2circles(10, 1, 0.05, 1), UsageError);
}

TEST_CASE("moons2circles is reproducible") {
    const auto a = gen_moons2circles(20, 5, 0.05, 7);
    const auto b = gen_moons2circles(20, 5, 0.05, 7);
    const auto c = gen_moons2circles(20, 5, 0.05, 8);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.instances[i].values == b.instances[i].values);
        CHECK(a.instances[i].label == b.instances[i].label);
        differs = differs || a.instances[i].values != c.instances[i].values;
    }
    CHECK(differs);
}

TEST_CASE("moons2circles endpoints at zero noise") {
    const auto ds = gen_moons2circles(40, 2, 0.0, 3);
    for (const auto &inst : ds.instances) {
        const auto m = inst.at(0);
        const auto c = inst.at(1);
        if (inst.label == -1) {
            CHECK(std::hypot(m[0], m[1]) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(m[1] >= -1e-12);
            CHECK(std::hypot(c[0], c[1]) == doctest::Approx(1.0).epsilon(1e-12));
        } else {
            CHECK(std::hypot(m[0] - 1.0, m[1] - 0.5) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(m[1] <= 0.5 + 1e-12);
            CHECK(std::hypot(c[0], c[1]) == doctest::Approx(0.5).epsilon(1e-12));
        }
    }
    const auto mid = gen_moons2circles(40, 3, 0.0, 3);
    const auto ends = gen_moons2circles(40, 2, 0.0, 3);
    for (std::size_t i = 0; i < mid.size(); ++i) {
        const auto a = ends.instances[i].at(0);
        const auto b = ends.instances[i].at(1);
        const auto h = mid.instances[i].at(1);
        CHECK(h[0] == doctest::Approx(0.5 * (a[0] + b[0])));
        CHECK(h[1] == doctest::Approx(0.5 * (a[1] + b[1])));
    }
}

TEST_CASE("sin-cos toy") {
    const auto ds = gen_sincos(3, 1);
    REQUIRE(ds.size() == 2);
    CHECK(ds.labels() == std::vector<int>{1, -1});
    CHECK(ds.instances[0].values[0] == 0.0);
    CHECK(ds.instances[1].values[0] == -1.0);
    CHECK(ds.times == std::vector<double>{0.0, pi / 2, pi});
    for (int l = 0; l < 3; ++l) {
        CHECK(ds.instances[0].values[static_cast<std::size_t>(l)] == doctest::Approx(-std::sin(ds.times[static_cast<std::size_t>(l)])));
        CHECK(ds.instances[1].values[static_cast<std::size_t>(l)] == doctest::Approx(-std::cos(ds.times[static_cast<std::size_t>(l)])));
    }
}

TEST_CASE("UCR text ingestion") {
    const auto tab = write_text("tshk_ucr_tab.tsv", "1\t0.0\t0.5\n2\t1.5\t-2\n");
    const auto ds = load_ucr_file(tab);
    REQUIRE(ds.size() == 2);
    CHECK(ds.instances[0].values == std::vector<double>{0.0, 0.5});
    CHECK(ds.instances[0].label == 1);
    CHECK(ds.instances[1].label == -1);
    CHECK(ds.times == std::vector<double>{0.5, 1.0});
    const auto comma = write_text("tshk_ucr_comma.csv", "2,1,2,3\n1,4,5,6\n");
    CHECK(load_ucr_file(comma).p() == 3);

    const auto ragged = write_text("tshk_ucr_ragged.tsv", "1\t0\t1\n2\t0\n");
    try {
        load_ucr_file(ragged);
        FAIL("ragged file accepted");
    } catch (const IngestionError &e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
    CHECK_THROWS_AS(load_ucr_file(write_text("tshk_ucr_label.tsv", "3\t0\t1\n")), IngestionError);
    CHECK_THROWS_AS(load_ucr_file(write_text("tshk_ucr_text.tsv", "1\tx\t1\n")), IngestionError);
    CHECK_THROWS_AS(load_ucr_file(std::filesystem::temp_directory_path() / "tshk_missing.tsv"), IngestionError);
    for (const auto &p : {tab, comma, ragged}) {
        std::filesystem::remove(p);
    }
}

TEST_CASE("gun-point files") {
    const auto [train, test] = load_ucr(gunpoint("TRAIN"), gunpoint("TEST"));
    CHECK(train.size() == 50);
    CHECK(test.size() == 150);
    CHECK(train.p() == 150);
    CHECK(test.p() == 150);
    CHECK(train.d == 1);
    CHECK(train.has_both_classes());
    const auto dec = decimate(train, 3);
    CHECK(dec.p() == 50);
}

TEST_CASE("UCR round trip") {
    const auto src = gen_moons2circles(6, 4, 0.1, 2);
    Dataset uni;
    uni.name = "uni";
    uni.d = 1;
    uni.times = {0.25, 0.5, 0.75, 1.0};
    for (const auto &inst : src.instances) {
        uni.instances.push_back({{inst.values[0], inst.values[2], inst.values[4], inst.values[6]}, 4, 1, inst.label});
    }
    const auto path = std::filesystem::temp_directory_path() / "tshk_roundtrip.tsv";
    save_ucr(uni, path);
    const auto back = load_ucr_file(path);
    REQUIRE(back.size() == uni.size());
    for (std::size_t i = 0; i < uni.size(); ++i) {
        CHECK(back.instances[i].label == uni.instances[i].label);
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(std::abs(back.instances[i].values[k] - uni.instances[i].values[k]) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(save_ucr(src, path), UsageError);
    std::filesystem::remove(path);
}

TEST_CASE("decimation") {
    Dataset ds;
    ds.name = "five";
    ds.d = 1;
    ds.times = {1, 2, 3, 4, 5};
    ds.instances.push_back({{10, 11, 12, 13, 14}, 5, 1, 1});
    const auto same = decimate(ds, 1);
    CHECK(same.instances[0].values == ds.instances[0].values);
    const auto half = decimate(ds, 2);
    CHECK(half.p() == 3);
    CHECK(half.times == std::vector<double>{1, 3, 5});
    CHECK(half.instances[0].values == std::vector<double>{10, 12, 14});
    CHECK_THROWS_AS(decimate(ds, 6), UsageError);
    CHECK_THROWS_AS(decimate(ds, 0), UsageError);
}

TEST_CASE("feature scaling") {
    Dataset ds;
    ds.name = "scale";
    ds.d = 2;
    ds.times = {0, 1};
    ds.instances.push_back({{0, 5, 2, 5}, 2, 2, 1});
    ds.instances.push_back({{1, 5, 2, 5}, 2, 2, -1});
    const auto s = fit_scaler(ds, 0, pi);
    CHECK(s.degenerate_dims == std::vector<int>{1});
    const auto scaled = apply_scaler(ds, s);
    CHECK(scaled.instances[1].values[0] == doctest::Approx(pi / 2));
    CHECK(scaled.instances[0].values[0] == doctest::Approx(0.0));
    CHECK(scaled.instances[0].values[2] == doctest::Approx(pi));
    CHECK(scaled.instances[0].values[1] == doctest::Approx(pi / 2));
    for (const auto &inst : scaled.instances) {
        for (double v : inst.values) {
            CHECK(v >= -1e-15);
            CHECK(v <= pi + 1e-15);
        }
    }
    Dataset outside = ds;
    outside.instances[0].values[0] = 4.0;
    CHECK(apply_scaler(outside, s).instances[0].values[0] == doctest::Approx(2 * pi));
}

TEST_CASE("dataset validation") {
    Dataset ds;
    ds.name = "bad";
    ds.d = 1;
    ds.times = {0, 0};
    ds.instances.push_back({{1, 2}, 2, 1, 1});
    CHECK_THROWS_AS(ds.validate(), UsageError);
    ds.times = {0, 1};
    ds.instances[0].label = 0;
    CHECK_THROWS_AS(ds.validate(), UsageError);
    ds.instances[0].label = 1;
    ds.instances[0].values[1] = std::nan("");
    CHECK_THROWS_AS(ds.validate(), UsageError);
    ds.instances[0].values = {1, 2, 3};
    CHECK_THROWS_AS(ds.validate(), UsageError);
}

TEST_CASE("CSV export round trip") {
    const auto ds = gen_moons2circles(10, 4, 0.05, 9);
    const auto dir = std::filesystem::temp_directory_path();
    write_csv(ds, dir / "tshk_m2c.csv");
    write_manifest(ds, dir / "tshk_m2c.manifest.json");
    std::ifstream in(dir / "tshk_m2c.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("label,t1_f1,t1_f2,t2_f1", 0) == 0);
    const auto back = read_csv(dir / "tshk_m2c.csv", dir / "tshk_m2c.manifest.json");
    CHECK(back.size() == ds.size());
    CHECK(back.times == ds.times);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.instances[i].label == ds.instances[i].label);
        for (std::size_t k = 0; k < ds.instances[i].values.size(); ++k) {
            CHECK(back.instances[i].values[k] == ds.instances[i].values[k]);
        }
    }
    std::filesystem::remove(dir / "tshk_m2c.csv");
    std::filesystem::remove(dir / "tshk_m2c.manifest.json");
}
