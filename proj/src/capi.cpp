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

#include "phaseconv/phaseconv.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "phaseconv/distributions.hpp"
#include "phaseconv/mixed.hpp"
#include "phaseconv/sweep.hpp"
#include "phaseconv/u1.hpp"
#include "phaseconv/version.hpp"
#include "phaseconv/zd.hpp"

struct pc_distribution {
    phaseconv::IntDistribution value;
};
struct pc_number_state {
    phaseconv::u1::NumberState value;
};
struct pc_posterior {
    phaseconv::u1::PosteriorSpec value;
};
struct pc_mixed_target {
    phaseconv::mixed::MixedTarget value;
};
struct pc_config {
    phaseconv::sweep::SweepConfig value;
};
struct pc_result {
    phaseconv::sweep::SweepResult value;
};

namespace {

using phaseconv::Error;
using phaseconv::ErrorCode;

thread_local std::string last_error;

pc_status status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument:
            return PC_INVALID_ARGUMENT;
        case ErrorCode::precision_loss:
            return PC_PRECISION_LOSS;
        case ErrorCode::support_too_narrow:
            return PC_SUPPORT_TOO_NARROW;
        case ErrorCode::gapped_spectrum:
            return PC_GAPPED_SPECTRUM;
        case ErrorCode::negative_offset:
            return PC_NEGATIVE_OFFSET;
        case ErrorCode::zero_variance:
            return PC_ZERO_VARIANCE;
        case ErrorCode::resource_exhausted:
            return PC_RESOURCE_EXHAUSTED;
        case ErrorCode::combinatorial_blowup:
            return PC_COMBINATORIAL_BLOWUP;
        case ErrorCode::dimension_mismatch:
            return PC_DIMENSION_MISMATCH;
        case ErrorCode::not_psd:
            return PC_NOT_PSD;
        case ErrorCode::cap_exceeded:
            return PC_CAP_EXCEEDED;
        case ErrorCode::validation:
            return PC_VALIDATION;
        case ErrorCode::io:
            return PC_IO;
    }
    return PC_INTERNAL;
}

pc_status fail(pc_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

// Runs f, translating exceptions into status codes.
template <class F>
pc_status guarded(F &&f) {
    try {
        last_error.clear();
        return f();
    } catch (const Error &e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc &) {
        return fail(PC_RESOURCE_EXHAUSTED, "out of memory");
    } catch (const std::exception &e) {
        return fail(PC_INTERNAL, e.what());
    }
}

#define PC_REQUIRE(cond, what) \
    if (!(cond)) return fail(PC_INVALID_ARGUMENT, what)

std::optional<phaseconv::sweep::Format> parse_format(const char *format) {
    if (format == nullptr || std::strcmp(format, "csv") == 0) return phaseconv::sweep::Format::csv;
    if (std::strcmp(format, "json") == 0) return phaseconv::sweep::Format::json;
    return std::nullopt;
}

}  // namespace

extern "C" {

const char *pc_version(void) { return phaseconv::kVersionString; }

const char *pc_status_name(pc_status status) {
    switch (status) {
        case PC_OK:
            return "ok";
        case PC_BUFFER_TOO_SMALL:
            return "buffer_too_small";
        case PC_INTERNAL:
            return "internal";
        default:
            break;
    }
    if (status > PC_OK && status < PC_BUFFER_TOO_SMALL) {
        return phaseconv::error_code_name(static_cast<ErrorCode>(status - 1));
    }
    return "unknown";
}

const char *pc_last_error(void) { return last_error.c_str(); }

pc_status pc_distribution_new(int64_t offset, const double *probs, size_t count, pc_distribution **out) {
    PC_REQUIRE(out && (probs || count == 0), "null argument");
    return guarded([&] {
        auto d = phaseconv::IntDistribution::from_probs(offset, std::vector<double>(probs, probs + count));
        *out = new pc_distribution{std::move(d)};
        return PC_OK;
    });
}

void pc_distribution_free(pc_distribution *dist) { delete dist; }

int64_t pc_distribution_offset(const pc_distribution *dist) { return dist ? dist->value.offset() : 0; }

size_t pc_distribution_size(const pc_distribution *dist) { return dist ? dist->value.size() : 0; }

pc_status pc_distribution_probs(const pc_distribution *dist, double *out, size_t capacity) {
    PC_REQUIRE(dist && (out || capacity == 0), "null argument");
    const auto p = dist->value.probs();
    std::memcpy(out, p.data(), sizeof(double) * std::min(capacity, p.size()));
    if (capacity < p.size()) return fail(PC_BUFFER_TOO_SMALL, "buffer holds fewer entries than the support");
    return PC_OK;
}

pc_status pc_power_convolve(const pc_distribution *dist, uint64_t copies, pc_distribution **out) {
    PC_REQUIRE(dist && out, "null argument");
    return guarded([&] {
        *out = new pc_distribution{phaseconv::power_convolve(dist->value, copies)};
        return PC_OK;
    });
}

pc_status pc_moments(const pc_distribution *dist, double *mean, double *variance) {
    PC_REQUIRE(dist && mean && variance, "null argument");
    const auto m = phaseconv::moments(dist->value);
    *mean = m.mean;
    *variance = m.variance;
    return PC_OK;
}

pc_status pc_l1_distance(const pc_distribution *a, const pc_distribution *b, double *out) {
    PC_REQUIRE(a && b && out, "null argument");
    *out = phaseconv::l1_distance(a->value, b->value);
    return PC_OK;
}

pc_status pc_char_fn(const pc_distribution *dist, double gamma, double *re, double *im) {
    PC_REQUIRE(dist && re && im, "null argument");
    const auto z = phaseconv::char_fn(dist->value, gamma);
    *re = z.real();
    *im = z.imag();
    return PC_OK;
}

pc_status pc_number_state_new(const pc_distribution *spectrum, pc_number_state **out) {
    PC_REQUIRE(spectrum && out, "null argument");
    return guarded([&] {
        *out = new pc_number_state{phaseconv::u1::standardize(spectrum->value)};
        return PC_OK;
    });
}

void pc_number_state_free(pc_number_state *state) { delete state; }

double pc_number_state_variance(const pc_number_state *state) { return state ? state->value.variance() : 0.0; }

pc_status pc_figure_of_merit_exact(const pc_number_state *source, uint64_t n_copies, const pc_number_state *target,
                                   uint64_t m_copies, double *out) {
    PC_REQUIRE(source && target && out, "null argument");
    return guarded([&] {
        *out = phaseconv::u1::figure_of_merit_exact(source->value, n_copies, target->value, m_copies);
        return PC_OK;
    });
}

pc_status pc_figure_of_merit_closed(double sigma_phi_sq, uint64_t n_copies, double sigma_psi_sq, uint64_t m_copies,
                                    double *out) {
    PC_REQUIRE(out, "null argument");
    return guarded([&] {
        *out = phaseconv::u1::figure_of_merit_closed(sigma_phi_sq, n_copies, sigma_psi_sq, m_copies);
        return PC_OK;
    });
}

pc_status pc_figure_of_merit_mc(const pc_number_state *source, uint64_t n_copies, const pc_number_state *target,
                                uint64_t m_copies, uint64_t draws, uint64_t seed, double *estimate,
                                double *stderr_out) {
    PC_REQUIRE(source && target && estimate, "null argument");
    return guarded([&] {
        const auto r = phaseconv::u1::figure_of_merit_mc(source->value, n_copies, target->value, m_copies, draws, seed);
        *estimate = r.estimate;
        if (stderr_out) *stderr_out = r.stderr_;
        return PC_OK;
    });
}

pc_status pc_posterior_new(const pc_number_state *source, uint64_t n_copies, pc_posterior **out) {
    PC_REQUIRE(source && out, "null argument");
    return guarded([&] {
        *out = new pc_posterior{phaseconv::u1::PosteriorSpec::make(source->value, n_copies)};
        return PC_OK;
    });
}

void pc_posterior_free(pc_posterior *posterior) { delete posterior; }

pc_status pc_posterior_density(const pc_posterior *posterior, double gamma, int gaussian, double *out) {
    PC_REQUIRE(posterior && out, "null argument");
    return guarded([&] {
        *out = gaussian ? phaseconv::u1::posterior_density_gauss(posterior->value, gamma)
                        : phaseconv::u1::posterior_density_exact(posterior->value, gamma);
        return PC_OK;
    });
}

pc_status pc_posterior_sample(const pc_posterior *posterior, uint64_t seed, int gaussian, double *out) {
    PC_REQUIRE(posterior && out, "null argument");
    return guarded([&] {
        const auto mode = gaussian ? phaseconv::u1::SampleMode::gauss : phaseconv::u1::SampleMode::exact;
        *out = phaseconv::u1::sample_gamma(posterior->value, seed, mode);
        return PC_OK;
    });
}

pc_status pc_zd_coeffs(const double *p, size_t d, uint64_t copies, double *out, double *epsilon) {
    PC_REQUIRE(p && out, "null argument");
    return guarded([&] {
        const auto cc = phaseconv::zd::canonical_coeffs(std::span<const double>(p, d), copies);
        std::copy(cc.c.begin(), cc.c.end(), out);
        if (epsilon) *epsilon = cc.epsilon;
        return PC_OK;
    });
}

pc_status pc_zd_success_probability(const double *p, size_t d, uint64_t copies, double *out) {
    PC_REQUIRE(p && out, "null argument");
    return guarded([&] {
        *out = phaseconv::zd::success_probability(std::span<const double>(p, d), copies, d);
        return PC_OK;
    });
}

pc_status pc_zd_contraction_rate(const double *p, size_t d, double *out) {
    PC_REQUIRE(p && out, "null argument");
    return guarded([&] {
        *out = phaseconv::zd::contraction_rate(std::span<const double>(p, d));
        return PC_OK;
    });
}

pc_status pc_mixed_target_new(const pc_number_state *const *states, const double *weights, size_t rank,
                              pc_mixed_target **out) {
    PC_REQUIRE(states && weights && out && rank > 0, "null argument or empty target");
    return guarded([&] {
        std::vector<phaseconv::mixed::MixedComponent> components;
        for (size_t k = 0; k < rank; ++k) {
            if (!states[k]) throw Error(ErrorCode::invalid_argument, "null component state");
            components.push_back({weights[k], states[k]->value});
        }
        *out = new pc_mixed_target{phaseconv::mixed::MixedTarget::make(std::move(components))};
        return PC_OK;
    });
}

void pc_mixed_target_free(pc_mixed_target *target) { delete target; }

pc_status pc_epsilon_schedule(uint64_t m_copies, double *out) {
    PC_REQUIRE(out, "null argument");
    return guarded([&] {
        *out = phaseconv::mixed::epsilon_schedule(m_copies);
        return PC_OK;
    });
}

pc_status pc_residual_mass(const pc_mixed_target *target, uint64_t m_copies, double epsilon, double *out) {
    PC_REQUIRE(target && out, "null argument");
    return guarded([&] {
        *out = phaseconv::mixed::typical_decomposition(target->value, m_copies, epsilon).residual_mass;
        return PC_OK;
    });
}

pc_status pc_mixed_lower_bound(const pc_mixed_target *target, uint64_t m_copies, double gamma, double epsilon,
                               int exact_classes, double *out) {
    PC_REQUIRE(target && out, "null argument");
    return guarded([&] {
        const auto mode =
            exact_classes ? phaseconv::mixed::ClassFidelity::exact : phaseconv::mixed::ClassFidelity::gaussian;
        *out = phaseconv::mixed::fidelity_mixed_lower_bound(target->value, m_copies, gamma, epsilon, mode);
        return PC_OK;
    });
}

pc_status pc_figure_of_merit_mixed_bound(const pc_number_state *source, uint64_t n_copies,
                                         const pc_mixed_target *target, uint64_t m_copies, double epsilon,
                                         double *out) {
    PC_REQUIRE(source && target && out, "null argument");
    return guarded([&] {
        phaseconv::mixed::MixedBoundOptions options;
        if (epsilon >= 0.0) options.epsilon = epsilon;
        *out = phaseconv::mixed::figure_of_merit_mixed_bound(source->value, n_copies, target->value, m_copies, options);
        return PC_OK;
    });
}

pc_status pc_config_parse(const char *text, size_t length, const char *experiment, pc_config **out) {
    PC_REQUIRE(text && out, "null argument");
    return guarded([&] {
        std::optional<phaseconv::sweep::Experiment> expected;
        if (experiment) {
            expected = phaseconv::sweep::parse_experiment(experiment);
            if (!expected) throw Error(ErrorCode::validation, std::string("unknown experiment \"") + experiment + "\"");
        }
        *out = new pc_config{phaseconv::sweep::parse_config(std::string_view(text, length), expected)};
        return PC_OK;
    });
}

void pc_config_free(pc_config *config) { delete config; }

pc_status pc_config_set_seed(pc_config *config, uint64_t seed) {
    PC_REQUIRE(config, "null argument");
    config->value.seed = seed;
    return PC_OK;
}

const char *pc_config_output(const pc_config *config) {
    return config && config->value.output ? config->value.output->c_str() : nullptr;
}

const char *pc_config_format(const pc_config *config) { return config ? config->value.format.c_str() : "csv"; }

pc_status pc_run(const pc_config *config, unsigned jobs, int timing, pc_result **out) {
    PC_REQUIRE(config && out, "null argument");
    return guarded([&] {
        phaseconv::sweep::RunOptions options;
        options.jobs = jobs;
        options.timing = timing != 0;
        *out = new pc_result{phaseconv::sweep::run_sweep(config->value, options)};
        return PC_OK;
    });
}

void pc_result_free(pc_result *result) { delete result; }

size_t pc_result_rows(const pc_result *result) { return result ? result->value.rows.size() : 0; }

size_t pc_result_failed_rows(const pc_result *result) { return result ? result->value.failed_rows() : 0; }

int pc_result_exit_code(const pc_result *result) { return result ? result->value.exit_code() : 1; }

pc_status pc_result_emit(const pc_result *result, const char *format, char **out) {
    PC_REQUIRE(result && out, "null argument");
    const auto f = parse_format(format);
    PC_REQUIRE(f, "format must be \"csv\" or \"json\"");
    return guarded([&] {
        const std::string text = phaseconv::sweep::emit(result->value, *f);
        char *buf = static_cast<char *>(std::malloc(text.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out = buf;
        return PC_OK;
    });
}

pc_status pc_result_write(const pc_result *result, const char *format, const char *path) {
    PC_REQUIRE(result && path, "null argument");
    const auto f = parse_format(format);
    PC_REQUIRE(f, "format must be \"csv\" or \"json\"");
    return guarded([&] {
        phaseconv::sweep::write_file(path, phaseconv::sweep::emit(result->value, *f));
        return PC_OK;
    });
}

void pc_string_free(char *s) { std::free(s); }

}  // extern "C"
