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

#include "phaseconv/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "phaseconv/distributions.hpp"
#include "phaseconv/mixed.hpp"
#include "phaseconv/random.hpp"
#include "phaseconv/u1.hpp"
#include "phaseconv/version.hpp"
#include "phaseconv/zd.hpp"

namespace phaseconv::sweep {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::pair<Experiment, const char *> kExperimentNames[] = {
    {Experiment::u1_fom, "u1-fom"},
    {Experiment::u1_posterior, "u1-posterior"},
    {Experiment::u1_rates, "u1-rates"},
    {Experiment::zd, "zd"},
    {Experiment::mixed_bound, "mixed-bound"},
    {Experiment::mixed_oracle, "mixed-oracle"},
};

const std::set<std::string> kAllowedKeys = {
    "schema_version", "experiment", "source",   "target", "n_grid",  "m_schedule", "gammas",
    "methods",        "mc_draws",   "seed",     "epsilon", "convergence_threshold",  "output",
    "format",         "caps",       "jobs",
};

const std::set<std::string> kAllowedCaps = {"fft_max_support", "max_type_classes", "dense_dim", "quadrature_points"};

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// splitmix64 finalizer; decorrelates per-row seeds from the base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Validator {
   public:
    void issue(const std::string &field, const std::string &message) { issues_.push_back(field + ": " + message); }
    bool ok() const { return issues_.empty(); }
    std::vector<std::string> take() { return std::move(issues_); }

    std::optional<std::uint64_t> u64(const json &j, const std::string &field, std::uint64_t min_value = 0) {
        if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
            issue(field, "expected a nonnegative integer");
            return std::nullopt;
        }
        const auto v = j.get<std::uint64_t>();
        if (v < min_value) {
            issue(field, "must be >= " + std::to_string(min_value));
            return std::nullopt;
        }
        return v;
    }

    std::optional<double> real(const json &j, const std::string &field) {
        if (!j.is_number()) {
            issue(field, "expected a number");
            return std::nullopt;
        }
        return j.get<double>();
    }

    std::optional<SpectrumSpec> spectrum(const json &j, const std::string &field, bool allow_weight) {
        if (!j.is_object()) {
            issue(field, "expected an object with \"probs\" and optional \"offset\"");
            return std::nullopt;
        }
        for (const auto &[k, v] : j.items()) {
            if (k != "probs" && k != "offset" && !(allow_weight && k == "weight")) issue(field + "." + k, "unknown key");
        }
        SpectrumSpec out;
        if (j.contains("offset")) {
            if (!j["offset"].is_number_integer()) {
                issue(field + ".offset", "expected an integer");
            } else {
                out.offset = j["offset"].get<std::int64_t>();
            }
        }
        if (!j.contains("probs") || !j["probs"].is_array() || j["probs"].empty()) {
            issue(field + ".probs", "expected a nonempty array of probabilities");
            return std::nullopt;
        }
        double total = 0.0;
        bool good = true;
        for (std::size_t i = 0; i < j["probs"].size(); ++i) {
            const auto &x = j["probs"][i];
            if (!x.is_number() || !(x.get<double>() >= 0.0) || !std::isfinite(x.get<double>())) {
                issue(field + ".probs[" + std::to_string(i) + "]", "must be a finite number >= 0");
                good = false;
                continue;
            }
            out.probs.push_back(x.get<double>());
            total += x.get<double>();
        }
        if (!good) return std::nullopt;
        if (std::abs(total - 1.0) > 1e-9) {
            std::ostringstream os;
            os.precision(12);
            os << "probabilities sum to " << total << ", expected 1";
            issue(field + ".probs", os.str());
            return std::nullopt;
        }
        for (auto &x : out.probs) x /= total;
        return out;
    }

   private:
    std::vector<std::string> issues_;
};

bool needs_source(Experiment e) { return e != Experiment::mixed_oracle; }
bool needs_target(Experiment e) {
    return e == Experiment::u1_fom || e == Experiment::u1_rates || e == Experiment::mixed_bound ||
           e == Experiment::mixed_oracle;
}
bool needs_n_grid(Experiment e) { return e != Experiment::mixed_oracle; }
bool needs_schedule(Experiment e) {
    return e == Experiment::u1_fom || e == Experiment::u1_rates || e == Experiment::mixed_bound ||
           e == Experiment::mixed_oracle;
}

u1::NumberState number_state(const SpectrumSpec &s) {
    return u1::standardize(IntDistribution::from_probs(s.offset, s.probs, 1e-9));
}

mixed::MixedTarget mixed_target(const std::vector<ComponentSpec> &components) {
    std::vector<mixed::MixedComponent> out;
    for (const auto &c : components) out.push_back(mixed::MixedComponent{c.weight, number_state(c.spectrum)});
    return mixed::MixedTarget::make(std::move(out));
}

u1::RateSchedule rate_schedule(const ScheduleSpec &s) {
    switch (s.kind) {
        case ScheduleSpec::Kind::exponent:
            return u1::RateSchedule::power(s.param);
        case ScheduleSpec::Kind::slope:
            return u1::RateSchedule::linear(s.param);
        case ScheduleSpec::Kind::list:
            return u1::RateSchedule::explicit_list(s.list);
        case ScheduleSpec::Kind::none:
            break;
    }
    throw Error(ErrorCode::invalid_argument, "no M schedule configured");
}

void parse_schedule(Validator &v, const json &j, SweepConfig &cfg) {
    auto &s = cfg.m_schedule;
    const auto set_param = [&](ScheduleSpec::Kind kind, double x, const std::string &field) {
        if (kind == ScheduleSpec::Kind::exponent && !(x > 0.0 && x <= 1.0)) {
            v.issue(field, "exponent a must lie in (0, 1]");
        } else if (kind == ScheduleSpec::Kind::slope && !(x > 0.0)) {
            v.issue(field, "slope c must be positive");
        } else {
            s.kind = kind;
            s.param = x;
        }
    };
    if (j.is_string()) {
        const auto text = j.get<std::string>();
        const auto eq = text.find('=');
        if (eq == std::string::npos || (text.substr(0, eq) != "a" && text.substr(0, eq) != "c")) {
            v.issue("m_schedule", "expected \"a=<exponent>\", \"c=<slope>\", a list, or an object");
            return;
        }
        char *end = nullptr;
        const std::string num = text.substr(eq + 1);
        const double x = std::strtod(num.c_str(), &end);
        if (num.empty() || *end != '\0') {
            v.issue("m_schedule", "could not parse number in \"" + text + "\"");
            return;
        }
        set_param(text[0] == 'a' ? ScheduleSpec::Kind::exponent : ScheduleSpec::Kind::slope, x, "m_schedule");
    } else if (j.is_array()) {
        std::vector<std::uint64_t> list;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (auto m = v.u64(j[i], "m_schedule[" + std::to_string(i) + "]", 1)) list.push_back(*m);
        }
        if (list.empty()) v.issue("m_schedule", "explicit list is empty");
        s.kind = ScheduleSpec::Kind::list;
        s.list = std::move(list);
    } else if (j.is_object() && j.size() == 1) {
        const auto &[key, value] = *j.items().begin();
        if (key == "exponent" || key == "slope") {
            if (auto x = v.real(value, "m_schedule." + key)) {
                set_param(key == "exponent" ? ScheduleSpec::Kind::exponent : ScheduleSpec::Kind::slope, *x,
                          "m_schedule." + key);
            }
        } else if (key == "list") {
            parse_schedule(v, value, cfg);
        } else {
            v.issue("m_schedule." + key, "unknown key");
        }
    } else {
        v.issue("m_schedule", "expected \"a=<exponent>\", \"c=<slope>\", a list, or an object");
    }
}

void parse_caps(Validator &v, const json &j, Caps &caps) {
    if (!j.is_object()) {
        v.issue("caps", "expected an object");
        return;
    }
    for (const auto &[k, value] : j.items()) {
        if (!kAllowedCaps.count(k)) {
            v.issue("caps." + k, "unknown key");
            continue;
        }
        const auto x = v.u64(value, "caps." + k);
        if (!x) continue;
        if (k == "fft_max_support") caps.fft_max_support = *x;
        if (k == "max_type_classes") caps.max_type_classes = *x;
        if (k == "dense_dim") caps.dense_dim = *x;
        if (k == "quadrature_points") caps.quadrature_points = *x;
    }
}

}  // namespace

const char *experiment_name(Experiment e) {
    for (const auto &[value, name] : kExperimentNames) {
        if (value == e) return name;
    }
    return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
    for (const auto &[value, n] : kExperimentNames) {
        if (name == n) return value;
    }
    return std::nullopt;
}

std::uint64_t SweepConfig::m_at(std::size_t index) const {
    const std::uint64_t n = index < n_grid.size() ? n_grid[index] : 0;
    return rate_schedule(m_schedule).m_for(n, index);
}

namespace {

std::string join_issues(const std::vector<std::string> &issues) {
    std::string out = "invalid configuration";
    for (const auto &i : issues) out += "\n  " + i;
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(ErrorCode::validation, join_issues(issues)), issues_(std::move(issues)) {}

SweepConfig parse_config(std::string_view text, std::optional<Experiment> expected) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError({std::string("document: ") + e.what()});
    }
    if (!doc.is_object()) throw ConfigError({"document: must be a JSON object"});

    Validator v;
    SweepConfig cfg;
    for (const auto &[k, value] : doc.items()) {
        if (!kAllowedKeys.count(k)) v.issue(k, "unknown key");
    }

    if (doc.contains("schema_version")) {
        if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion) {
            v.issue("schema_version", "unsupported (expected " + std::to_string(kSchemaVersion) + ")");
        }
    }

    std::optional<Experiment> kind = expected;
    if (doc.contains("experiment")) {
        const auto &e = doc["experiment"];
        const auto parsed = e.is_string() ? parse_experiment(e.get<std::string>()) : std::nullopt;
        if (!parsed) {
            v.issue("experiment", "unknown experiment kind");
        } else if (expected && *expected != *parsed) {
            v.issue("experiment", std::string("document says \"") + experiment_name(*parsed) +
                                      "\" but \"" + experiment_name(*expected) + "\" was requested");
        } else {
            kind = parsed;
        }
    }
    if (!kind) {
        if (!doc.contains("experiment")) v.issue("experiment", "missing (give it in the document or on the command line)");
        throw ConfigError(v.take());
    }
    cfg.experiment = *kind;
    const Experiment ex = *kind;

    if (doc.contains("source")) {
        cfg.source = v.spectrum(doc["source"], "source", false);
        if (cfg.source) {
            if (ex == Experiment::zd) {
                if (cfg.source->offset != 0) v.issue("source.offset", "Z_d sources are indexed from 0");
                if (cfg.source->probs.size() < 2) v.issue("source.probs", "Z_d needs d >= 2 entries");
            } else {
                try {
                    const auto st = number_state(*cfg.source);
                    if (st.asymmetry_free() && ex == Experiment::u1_posterior) {
                        v.issue("source", "asymmetry-free source has no Gaussian posterior model");
                    }
                } catch (const Error &e) {
                    v.issue("source", e.what());
                }
            }
        }
    } else if (needs_source(ex)) {
        v.issue("source", "missing");
    }

    if (doc.contains("target")) {
        const auto &t = doc["target"];
        if (t.is_object() && t.contains("components")) {
            for (const auto &[k, value] : t.items()) {
                if (k != "components") v.issue("target." + k, "unknown key");
            }
            const auto &cs = t["components"];
            if (!cs.is_array() || cs.empty()) {
                v.issue("target.components", "expected a nonempty array");
            } else {
                for (std::size_t i = 0; i < cs.size(); ++i) {
                    const std::string field = "target.components[" + std::to_string(i) + "]";
                    auto s = v.spectrum(cs[i], field, true);
                    double w = 0.0;
                    if (!cs[i].is_object() || !cs[i].contains("weight")) {
                        v.issue(field + ".weight", "missing");
                    } else if (auto x = v.real(cs[i]["weight"], field + ".weight")) {
                        w = *x;
                        if (!(w > 0.0)) v.issue(field + ".weight", "must be positive");
                    }
                    if (s) cfg.target.push_back(ComponentSpec{w, *s});
                }
                double total = 0.0;
                for (const auto &c : cfg.target) total += c.weight;
                if (cfg.target.size() == cs.size() && std::abs(total - 1.0) > 1e-9) {
                    std::ostringstream os;
                    os.precision(12);
                    os << "weights sum to " << total << ", expected 1";
                    v.issue("target.components", os.str());
                } else {
                    for (auto &c : cfg.target) c.weight /= total;
                }
            }
        } else if (auto s = v.spectrum(t, "target", false)) {
            cfg.target.push_back(ComponentSpec{1.0, *s});
        }
        if (v.ok()) {
            try {
                (void)mixed_target(cfg.target);
            } catch (const Error &e) {
                v.issue("target", e.what());
            }
        }
        if ((ex == Experiment::u1_fom || ex == Experiment::u1_rates) && cfg.target.size() > 1) {
            v.issue("target", "u1 experiments need a pure target (single spectrum)");
        }
    } else if (needs_target(ex)) {
        v.issue("target", "missing");
    }

    if (doc.contains("n_grid")) {
        const auto &g = doc["n_grid"];
        if (!g.is_array() || g.empty()) {
            v.issue("n_grid", "expected a nonempty array of positive integers");
        } else {
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (auto n = v.u64(g[i], "n_grid[" + std::to_string(i) + "]", 1)) cfg.n_grid.push_back(*n);
            }
            for (std::size_t i = 1; i < cfg.n_grid.size(); ++i) {
                if (cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
                    v.issue("n_grid", "must be strictly increasing");
                    break;
                }
            }
        }
    } else if (needs_n_grid(ex)) {
        v.issue("n_grid", "missing");
    }

    if (doc.contains("m_schedule")) {
        parse_schedule(v, doc["m_schedule"], cfg);
    } else if (needs_schedule(ex)) {
        v.issue("m_schedule", "missing");
    }
    if (cfg.m_schedule.kind == ScheduleSpec::Kind::list) {
        if (ex == Experiment::mixed_oracle) {
            for (auto m : cfg.m_schedule.list) {
                if (m > 3) v.issue("m_schedule", "mixed-oracle supports M <= 3");
            }
        } else if (!cfg.n_grid.empty() && cfg.m_schedule.list.size() != cfg.n_grid.size()) {
            v.issue("m_schedule", "explicit list length must equal the n_grid length");
        }
    } else if (ex == Experiment::mixed_oracle && cfg.m_schedule.kind != ScheduleSpec::Kind::none) {
        v.issue("m_schedule", "mixed-oracle needs an explicit list of M values");
    }

    if (doc.contains("gammas")) {
        const auto &g = doc["gammas"];
        if (!g.is_array() || g.empty()) {
            v.issue("gammas", "expected a nonempty array of angles");
        } else {
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (auto x = v.real(g[i], "gammas[" + std::to_string(i) + "]")) {
                    if (!(*x > -std::numbers::pi && *x <= std::numbers::pi)) {
                        v.issue("gammas[" + std::to_string(i) + "]", "must lie in (-pi, pi]");
                    } else {
                        cfg.gammas.push_back(*x);
                    }
                }
            }
        }
    } else if (ex == Experiment::mixed_oracle) {
        v.issue("gammas", "missing");
    }

    if (doc.contains("methods")) {
        const auto &m = doc["methods"];
        cfg.method_exact = cfg.method_closed = cfg.method_mc = false;
        if (!m.is_array() || m.empty()) {
            v.issue("methods", "expected a nonempty array of \"exact\", \"closed\", \"mc\"");
        } else {
            for (const auto &x : m) {
                const auto name = x.is_string() ? x.get<std::string>() : std::string();
                if (name == "exact") {
                    cfg.method_exact = true;
                } else if (name == "closed") {
                    cfg.method_closed = true;
                } else if (name == "mc") {
                    cfg.method_mc = true;
                } else {
                    v.issue("methods", "unknown method \"" + (x.is_string() ? name : x.dump()) + "\"");
                }
            }
        }
    }
    if (doc.contains("mc_draws")) {
        if (auto d = v.u64(doc["mc_draws"], "mc_draws", 100)) cfg.mc_draws = *d;
    }
    if (doc.contains("seed")) {
        if (auto s = v.u64(doc["seed"], "seed")) cfg.seed = *s;
    }
    if (doc.contains("epsilon")) {
        if (auto e = v.real(doc["epsilon"], "epsilon")) {
            if (!(*e >= 0.0 && *e <= 2.0)) {
                v.issue("epsilon", "must lie in [0, 2]");
            } else {
                cfg.epsilon = *e;
            }
        }
    }
    if (doc.contains("convergence_threshold")) {
        if (auto t = v.real(doc["convergence_threshold"], "convergence_threshold")) cfg.convergence_threshold = *t;
    }
    if (doc.contains("output")) {
        if (!doc["output"].is_string()) {
            v.issue("output", "expected a path string");
        } else {
            cfg.output = doc["output"].get<std::string>();
        }
    }
    if (doc.contains("format")) {
        const auto f = doc["format"].is_string() ? doc["format"].get<std::string>() : std::string();
        if (f != "csv" && f != "json") {
            v.issue("format", "expected \"csv\" or \"json\"");
        } else {
            cfg.format = f;
        }
    }
    if (doc.contains("caps")) parse_caps(v, doc["caps"], cfg.caps);
    if (doc.contains("jobs")) {
        if (auto j = v.u64(doc["jobs"], "jobs")) cfg.jobs = static_cast<unsigned>(*j);
    }

    if ((ex == Experiment::mixed_oracle || ex == Experiment::mixed_bound) && !cfg.epsilon &&
        cfg.m_schedule.kind == ScheduleSpec::Kind::list) {
        for (auto m : cfg.m_schedule.list) {
            if (m < 2) {
                v.issue("m_schedule", "M = 1 has no default epsilon; set \"epsilon\"");
                break;
            }
        }
    }

    if (!v.ok()) throw ConfigError(v.take());
    cfg.config_hash = fnv1a(doc.dump());
    return cfg;
}

std::size_t SweepResult::failed_rows() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const Row &r) { return r.error.has_value(); }));
}

int SweepResult::exit_code() const {
    bool failed = false;
    for (const auto &r : rows) {
        if (r.resource_failure) return 3;
        failed = failed || r.error.has_value();
    }
    return failed ? 2 : 0;
}

namespace {

struct Plan {
    std::vector<std::string> columns;
    std::size_t key_columns = 0;
    std::vector<std::vector<Cell>> keys;
    // Evaluates the metric cells of row i.
    std::function<std::vector<Cell>(std::size_t)> evaluate;
};

Plan plan_u1_fom(const SweepConfig &cfg, bool rates_only) {
    Plan plan;
    plan.columns = {"N", "M"};
    plan.key_columns = 2;
    const bool exact = rates_only || cfg.method_exact;
    const bool closed = rates_only || cfg.method_closed;
    const bool mc = !rates_only && cfg.method_mc;
    if (exact) plan.columns.push_back("f_exact");
    if (closed) plan.columns.push_back("f_closed");
    if (exact && closed) plan.columns.push_back("gap");
    if (mc) {
        plan.columns.push_back("f_mc");
        plan.columns.push_back("mc_stderr");
    }
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) plan.keys.push_back({cfg.n_grid[i], cfg.m_at(i)});

    const auto source = number_state(*cfg.source);
    const auto target = number_state(cfg.target.front().spectrum);
    PowerOptions power;
    power.max_support = cfg.caps.fft_max_support;
    plan.evaluate = [=, n_grid = cfg.n_grid, seed = cfg.seed, draws = cfg.mc_draws](std::size_t i) {
        const std::uint64_t n = n_grid[i];
        const std::uint64_t m = cfg.m_at(i);
        std::vector<Cell> out;
        double fe = 0.0, fc = 0.0;
        if (exact) out.emplace_back(fe = u1::figure_of_merit_exact(source, n, target, m, power));
        if (closed) out.emplace_back(fc = u1::figure_of_merit_closed(source.variance(), n, target.variance(), m));
        if (exact && closed) out.emplace_back(std::abs(fe - fc));
        if (mc) {
            const auto est = u1::figure_of_merit_mc(source, n, target, m, draws, mix_seed(seed, i), power);
            out.emplace_back(est.estimate);
            out.emplace_back(est.stderr_);
        }
        return out;
    };
    return plan;
}

Plan plan_u1_posterior(const SweepConfig &cfg) {
    Plan plan;
    plan.columns = {"N", "tv_distance", "l1_spectrum", "peak_exact", "peak_gauss"};
    plan.key_columns = 1;
    for (auto n : cfg.n_grid) plan.keys.push_back({n});
    const auto source = number_state(*cfg.source);
    PowerOptions power;
    power.max_support = cfg.caps.fft_max_support;
    const std::size_t points = cfg.caps.quadrature_points;
    plan.evaluate = [=, n_grid = cfg.n_grid](std::size_t i) {
        const auto spec = u1::PosteriorSpec::make(source, n_grid[i], power);
        const auto gauss = gaussian_pmf(GaussianModel::make(spec.mean, spec.variance));
        return std::vector<Cell>{u1::posterior_tv_distance(spec, points), l1_distance(spec.ncopy_spectrum, gauss),
                                 u1::posterior_density_exact(spec, 0.0), u1::posterior_density_gauss(spec, 0.0)};
    };
    return plan;
}

Plan plan_zd(const SweepConfig &cfg) {
    Plan plan;
    plan.columns = {"d", "N", "success_prob", "failure_prob", "epsilon", "max_flat_dev"};
    plan.key_columns = 2;
    const auto p = cfg.source->probs;
    const std::uint64_t d = p.size();
    for (auto n : cfg.n_grid) plan.keys.push_back({d, n});
    plan.evaluate = [=, n_grid = cfg.n_grid](std::size_t i) {
        const auto n = n_grid[i];
        const auto cc = zd::canonical_coeffs(p, n);
        double dev = 0.0;
        for (double x : cc.deviation) dev = std::max(dev, std::abs(x));
        const double fail = zd::failure_probability(p, n, d);
        return std::vector<Cell>{1.0 - fail, fail, cc.epsilon, dev};
    };
    return plan;
}

Plan plan_mixed_bound(const SweepConfig &cfg) {
    Plan plan;
    plan.columns = {"N", "M", "epsilon", "delta_rho", "classes", "f_bound", "f_closed_mean"};
    plan.key_columns = 2;
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) plan.keys.push_back({cfg.n_grid[i], cfg.m_at(i)});
    const auto source = number_state(*cfg.source);
    const auto target = mixed_target(cfg.target);
    mixed::MixedBoundOptions options;
    options.epsilon = cfg.epsilon;
    options.quadrature_points = cfg.caps.quadrature_points;
    options.max_classes = cfg.caps.max_type_classes;
    options.power.max_support = cfg.caps.fft_max_support;
    plan.evaluate = [=, n_grid = cfg.n_grid](std::size_t i) {
        const auto n = n_grid[i];
        const auto m = cfg.m_at(i);
        const double eps = options.epsilon ? *options.epsilon : mixed::epsilon_schedule(m);
        const auto dec = mixed::typical_decomposition(target, m, eps, options.max_classes);
        const double bound = mixed::figure_of_merit_mixed_bound(source, n, target, m, options);
        const double closed = u1::figure_of_merit_closed(source.variance(), n, target.mean_variance(), m);
        return std::vector<Cell>{eps, dec.residual_mass, static_cast<std::uint64_t>(dec.classes.size()), bound, closed};
    };
    return plan;
}

Plan plan_mixed_oracle(const SweepConfig &cfg) {
    Plan plan;
    plan.columns = {"M", "gamma", "f_dense", "bound_exact_class", "bound_gauss", "delta_rho"};
    plan.key_columns = 2;
    std::vector<std::pair<std::uint64_t, double>> grid;
    for (auto m : cfg.m_schedule.list) {
        for (double g : cfg.gammas) {
            grid.emplace_back(m, g);
            plan.keys.push_back({m, g});
        }
    }
    const auto target = mixed_target(cfg.target);
    plan.evaluate = [=, eps_override = cfg.epsilon, caps = cfg.caps](std::size_t i) {
        const auto [m, gamma] = grid[i];
        const double eps = eps_override ? *eps_override : mixed::epsilon_schedule(m);
        const auto dec = mixed::typical_decomposition(target, m, eps, caps.max_type_classes);
        return std::vector<Cell>{
            mixed::exact_mixed_fidelity_small(target, m, gamma, caps.dense_dim),
            mixed::fidelity_lower_bound(dec, target, gamma, mixed::ClassFidelity::exact),
            mixed::fidelity_lower_bound(dec, target, gamma, mixed::ClassFidelity::gaussian), dec.residual_mass};
    };
    return plan;
}

Plan make_plan(const SweepConfig &cfg) {
    switch (cfg.experiment) {
        case Experiment::u1_fom:
            return plan_u1_fom(cfg, false);
        case Experiment::u1_rates:
            return plan_u1_fom(cfg, true);
        case Experiment::u1_posterior:
            return plan_u1_posterior(cfg);
        case Experiment::zd:
            return plan_zd(cfg);
        case Experiment::mixed_bound:
            return plan_mixed_bound(cfg);
        case Experiment::mixed_oracle:
            return plan_mixed_oracle(cfg);
    }
    throw Error(ErrorCode::invalid_argument, "unknown experiment");
}

bool is_resource_code(ErrorCode c) {
    return c == ErrorCode::resource_exhausted || c == ErrorCode::combinatorial_blowup || c == ErrorCode::cap_exceeded;
}

double real_cell(const Row &row, std::size_t index) {
    if (row.error || index >= row.cells.size()) return std::nan("");
    if (const auto *d = std::get_if<double>(&row.cells[index])) return *d;
    return std::nan("");
}

void add_experiment_metadata(const SweepConfig &cfg, SweepResult &result) {
    auto &md = result.metadata;
    if (cfg.experiment == Experiment::u1_rates) {
        std::vector<u1::RateRow> rows;
        bool complete = true;
        for (const auto &r : result.rows) {
            if (r.error) {
                complete = false;
                continue;
            }
            rows.push_back(u1::RateRow{std::get<std::uint64_t>(r.cells[0]), std::get<std::uint64_t>(r.cells[1]),
                                       real_cell(r, 2), real_cell(r, 3), real_cell(r, 4)});
        }
        md.emplace_back("schedule", rate_schedule(cfg.m_schedule).label());
        md.emplace_back("convergence_threshold", cfg.convergence_threshold);
        md.emplace_back("verdict", complete ? std::string(u1::verdict_name(u1::classify_rates(rows, cfg.convergence_threshold)))
                                            : std::string("incomplete"));
    }
    if (cfg.experiment == Experiment::zd) {
        const auto &p = cfg.source->probs;
        md.emplace_back("epsilon", zd::contraction_rate(p));
        std::vector<std::uint64_t> ns;
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
            const double fail = real_cell(result.rows[i], 3);
            if (fail > 0.0) ns.push_back(cfg.n_grid[i]);
        }
        if (ns.size() >= 2) {
            const auto fit = zd::fit_failure_rate(p, p.size(), ns);
            md.emplace_back("slope_fit", fit.slope);
            md.emplace_back("prefactor_fit", std::exp(fit.intercept));
            const double eps = zd::contraction_rate(p);
            if (eps > 0.0) md.emplace_back("slope_predicted", 2.0 * std::log(eps));
        }
    }
    if (cfg.experiment == Experiment::mixed_bound || cfg.experiment == Experiment::mixed_oracle) {
        md.emplace_back("epsilon_rule", cfg.epsilon ? std::string("fixed") : std::string("((ln M)/M)^(1/4)"));
        md.emplace_back("bound_form", std::string("(1-delta_rho)^2*min_j F_j"));
    }
}

}  // namespace

SweepResult run_sweep(const SweepConfig &config, const RunOptions &options) {
    const auto start = std::chrono::steady_clock::now();
    const Plan plan = make_plan(config);

    SweepResult result;
    result.experiment = config.experiment;
    result.columns = plan.columns;
    result.key_columns = plan.key_columns;
    const std::size_t count = plan.keys.size();
    result.rows.resize(count);

    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (options.shuffle_seed) {
        Rng rng(*options.shuffle_seed);
        for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.next_u64() % i]);
    }

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t slot; (slot = next.fetch_add(1)) < count;) {
            const std::size_t i = order[slot];
            Row row;
            row.cells = plan.keys[i];
            try {
                auto metrics = plan.evaluate(i);
                row.cells.insert(row.cells.end(), metrics.begin(), metrics.end());
            } catch (const Error &e) {
                row.error = e.what();
                row.resource_failure = is_resource_code(e.code());
            } catch (const std::exception &e) {
                row.error = e.what();
            }
            result.rows[i] = std::move(row);
        }
    };
    unsigned jobs = options.jobs ? options.jobs : (config.jobs ? config.jobs : std::thread::hardware_concurrency());
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
        worker();
    }

    auto &md = result.metadata;
    md.emplace_back("schema_version", static_cast<std::int64_t>(kSchemaVersion));
    md.emplace_back("library_version", std::string(kVersionString));
    md.emplace_back("experiment", std::string(experiment_name(config.experiment)));
    md.emplace_back("seed", config.seed);
    md.emplace_back("config_hash", hex64(config.config_hash));
    md.emplace_back("rows", static_cast<std::uint64_t>(count));
    md.emplace_back("failed_rows", static_cast<std::uint64_t>(result.failed_rows()));
    add_experiment_metadata(config, result);
    if (options.timing) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        md.emplace_back("wall_time_s", elapsed.count());
    }
    return result;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

std::string csv_escape(const std::string &s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell &c) {
    return std::visit(
        [](const auto &v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_real(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return csv_escape(v);
            } else {
                return std::to_string(v);
            }
        },
        c);
}

ordered_json cell_json(const Cell &c) {
    return std::visit(
        [](const auto &v) -> ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) return nullptr;
                return std::strtod(format_real(v).c_str(), nullptr);
            } else {
                return v;
            }
        },
        c);
}

}  // namespace

std::string emit(const SweepResult &result, Format format) {
    const bool any_failed = result.failed_rows() > 0;
    if (format == Format::csv) {
        std::string out;
        for (std::size_t i = 0; i < result.columns.size(); ++i) out += (i ? "," : "") + result.columns[i];
        if (any_failed) out += ",error";
        out += "\n";
        for (const auto &row : result.rows) {
            for (std::size_t i = 0; i < result.columns.size(); ++i) {
                if (i) out += ",";
                if (i < row.cells.size() && !(row.error && i >= result.key_columns)) out += cell_text(row.cells[i]);
            }
            if (any_failed) out += "," + (row.error ? csv_escape(*row.error) : std::string());
            out += "\n";
        }
        return out;
    }

    ordered_json doc;
    ordered_json md = ordered_json::object();
    for (const auto &[k, v] : result.metadata) md[k] = cell_json(v);
    doc["metadata"] = md;
    doc["columns"] = result.columns;
    ordered_json rows = ordered_json::array();
    for (const auto &row : result.rows) {
        ordered_json r = ordered_json::object();
        for (std::size_t i = 0; i < result.columns.size(); ++i) {
            const bool present = i < row.cells.size() && !(row.error && i >= result.key_columns);
            r[result.columns[i]] = present ? cell_json(row.cells[i]) : ordered_json(nullptr);
        }
        if (row.error) r["error"] = *row.error;
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

void write_file(const std::string &path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::io, "write to " + path + " failed");
}

}  // namespace phaseconv::sweep
