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

#pragma once

// Batch sweeps: JSON configuration, parallel row evaluation with a
// deterministic merge, and CSV / JSON emission.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "phaseconv/error.hpp"

namespace phaseconv::sweep {

inline constexpr int kSchemaVersion = 1;

enum class Experiment { u1_fom, u1_posterior, u1_rates, zd, mixed_bound, mixed_oracle };

const char *experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

struct SpectrumSpec {
    std::vector<double> probs;
    std::int64_t offset = 0;
};

struct ComponentSpec {
    double weight = 1.0;
    SpectrumSpec spectrum;
};

struct ScheduleSpec {
    enum class Kind { none, exponent, slope, list };
    Kind kind = Kind::none;
    double param = 0.0;
    std::vector<std::uint64_t> list;
};

struct Caps {
    std::size_t fft_max_support = std::size_t{1} << 24;
    std::size_t max_type_classes = 1'000'000;
    std::size_t dense_dim = 8;
    std::size_t quadrature_points = 0;
};

struct SweepConfig {
    Experiment experiment = Experiment::u1_fom;
    std::optional<SpectrumSpec> source;
    std::vector<ComponentSpec> target;
    std::vector<std::uint64_t> n_grid;
    ScheduleSpec m_schedule;
    std::vector<double> gammas;
    bool method_exact = true;
    bool method_closed = true;
    bool method_mc = false;
    std::uint64_t mc_draws = 10'000;
    std::uint64_t seed = 0;
    std::optional<double> epsilon;
    double convergence_threshold = 0.95;
    std::optional<std::string> output;
    std::string format = "csv";
    Caps caps;
    unsigned jobs = 0;
    /// FNV-1a of the canonical (key-sorted) input document.
    std::uint64_t config_hash = 0;

    /// M for the i-th N (or the i-th explicit entry).
    std::uint64_t m_at(std::size_t index) const;
};

/// Raised by parse_config with every validation problem found, one per entry.
class ConfigError : public Error {
   public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string> &issues() const noexcept { return issues_; }

   private:
    std::vector<std::string> issues_;
};

/// Parses and validates a JSON document. `expected` (from the command line)
/// must agree with the document's "experiment" key when both are present.
SweepConfig parse_config(std::string_view text, std::optional<Experiment> expected = std::nullopt);

using Cell = std::variant<std::uint64_t, std::int64_t, double, std::string>;

struct Row {
    std::vector<Cell> cells;  ///< key cells then metrics; metrics empty on failure
    std::optional<std::string> error;
    bool resource_failure = false;
};

struct SweepResult {
    Experiment experiment = Experiment::u1_fom;
    std::vector<std::string> columns;
    std::size_t key_columns = 0;
    std::vector<Row> rows;
    /// Ordered metadata entries (string, integer or real values).
    std::vector<std::pair<std::string, Cell>> metadata;

    std::size_t failed_rows() const;
    /// 0 success, 2 partial row failures, 3 resource caps hit.
    int exit_code() const;
};

struct RunOptions {
    /// 0 = hardware concurrency.
    unsigned jobs = 0;
    /// Adds wall_time_s to the metadata (breaks byte-identical reruns).
    bool timing = false;
    /// Evaluates rows in a seeded random order (testing row independence).
    std::optional<std::uint64_t> shuffle_seed;
};

SweepResult run_sweep(const SweepConfig &config, const RunOptions &options = {});

enum class Format { csv, json };

/// CSV: fixed header per experiment, plus a trailing "error" column only if
/// some row failed. JSON: {"metadata": {...}, "columns": [...], "rows": [...]}.
/// Reals carry 12 significant digits in both.
std::string emit(const SweepResult &result, Format format);

/// Throws io on failure.
void write_file(const std::string &path, std::string_view contents);

/// "%.12g".
std::string format_real(double v);

}  // namespace phaseconv::sweep
