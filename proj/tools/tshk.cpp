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
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tshk/cli.hpp"
#include "tshk/error.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Time-series Hamiltonian kernel toolkit"};
    app.set_version_flag("--version", std::string(tshk::cli::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string model_path;
    std::string output;
    std::vector<std::string> overrides;
    int threads = 0;

    auto add_common = [&](CLI::App *sub, bool needs_model) {
        sub->add_option("-c,--config", config_path, "JSON run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        if (needs_model) {
            sub->add_option("-m,--model", model_path, "trained model JSON")->required();
        }
        sub->add_option("-o,--output", output, "output directory (overrides config)");
        sub->add_option("-s,--set", overrides, "override a config value: section.key=value");
        sub->add_option("-t,--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
    };
    add_common(app.add_subcommand("generate", "write train and test datasets"), false);
    add_common(app.add_subcommand("train", "train a kernel and write the model"), false);
    add_common(app.add_subcommand("eval", "fit SVMs and score the test split"), true);
    add_common(app.add_subcommand("probe", "time-resolved embedding overlap"), true);
    add_common(app.add_subcommand("qmp", "serial vs packed kernel evaluation"), true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    tshk::cli::CommandOptions opts;
    opts.command = app.get_subcommands().front()->get_name();
    if (!model_path.empty()) {
        opts.model_path = model_path;
    }
    if (!output.empty()) {
        opts.output = output;
    }
    try {
        std::ifstream in(config_path);
        auto doc = nlohmann::json::parse(in, nullptr, true, true);
        if (threads > 0) {
            doc["threads"] = threads;
        }
        doc = tshk::cli::apply_overrides(std::move(doc), overrides);
        const auto config = tshk::cli::parse_config(doc);
        return tshk::cli::run_command(config, opts);
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
        return 2;
    } catch (const tshk::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
}
