// Copyright 2026 The phaseconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// phaseconv: batch sweeps over the library's experiments. Links only the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "phaseconv/phaseconv.h"

namespace {

constexpr int kExitValidation = 1;

int report(pc_status status) {
    std::cerr << "phaseconv: " << pc_status_name(status) << ": " << pc_last_error() << "\n";
    return kExitValidation;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Reference-frame estimation and preparation sweeps"};
    app.set_version_flag("--version", std::string(pc_version()));

    std::string experiment;
    std::string config_path;
    std::string out_path;
    std::string format;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
    bool timing = false;

    app.add_option("experiment", experiment, "u1-fom | u1-posterior | u1-rates | zd | mixed-bound | mixed-oracle")
        ->required();
    app.add_option("--config", config_path, "JSON configuration")->required();
    auto *out_opt = app.add_option("--out", out_path, "output file (default: config \"output\", else stdout)");
    auto *format_opt =
        app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto *seed_opt = app.add_option("--seed", seed, "overrides the config seed");
    app.add_option("--jobs", jobs, "worker threads (default: config, else all cores)");
    app.add_flag("--timing", timing, "record wall time in JSON metadata");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "phaseconv: io: cannot read " << config_path << "\n";
        return kExitValidation;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    pc_config *config = nullptr;
    if (pc_status s = pc_config_parse(text.data(), text.size(), experiment.c_str(), &config); s != PC_OK) {
        return report(s);
    }
    if (*seed_opt) pc_config_set_seed(config, seed);
    if (!*format_opt) format = pc_config_format(config);
    if (!*out_opt && pc_config_output(config)) out_path = pc_config_output(config);

    pc_result *result = nullptr;
    if (pc_status s = pc_run(config, jobs, timing ? 1 : 0, &result); s != PC_OK) {
        pc_config_free(config);
        return report(s);
    }
    pc_config_free(config);

    int code = pc_result_exit_code(result);
    if (out_path.empty()) {
        char *textout = nullptr;
        if (pc_status s = pc_result_emit(result, format.c_str(), &textout); s != PC_OK) {
            pc_result_free(result);
            return report(s);
        }
        std::fwrite(textout, 1, std::strlen(textout), stdout);
        pc_string_free(textout);
    } else if (pc_status s = pc_result_write(result, format.c_str(), out_path.c_str()); s != PC_OK) {
        pc_result_free(result);
        return report(s);
    }
    if (const auto failed = pc_result_failed_rows(result); failed > 0) {
        std::cerr << "phaseconv: " << failed << " of " << pc_result_rows(result) << " rows failed\n";
    }
    pc_result_free(result);
    return code;
}
