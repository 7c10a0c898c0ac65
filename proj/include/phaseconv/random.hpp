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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace phaseconv {

/// Seeded generator with platform-independent uniform and normal draws
/// (std::*_distribution output is implementation-defined).
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open_low() { return 1.0 - uniform(); }

    /// Standard normal by Box-Muller (no cached second value, so a draw
    /// consumes exactly two engine outputs).
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(uniform_open_low()));
        return r * std::cos(2.0 * std::numbers::pi * uniform());
    }

    std::uint64_t next_u64() { return engine_(); }

   private:
    std::mt19937_64 engine_;
};

}  // namespace phaseconv
