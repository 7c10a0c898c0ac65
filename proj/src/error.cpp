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

#include "phaseconv/error.hpp"

namespace phaseconv {

const char *error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument:
            return "invalid_argument";
        case ErrorCode::precision_loss:
            return "precision_loss";
        case ErrorCode::support_too_narrow:
            return "support_too_narrow";
        case ErrorCode::gapped_spectrum:
            return "gapped_spectrum";
        case ErrorCode::negative_offset:
            return "negative_offset";
        case ErrorCode::zero_variance:
            return "zero_variance";
        case ErrorCode::resource_exhausted:
            return "resource_exhausted";
        case ErrorCode::combinatorial_blowup:
            return "combinatorial_blowup";
        case ErrorCode::dimension_mismatch:
            return "dimension_mismatch";
        case ErrorCode::not_psd:
            return "not_psd";
        case ErrorCode::cap_exceeded:
            return "cap_exceeded";
        case ErrorCode::validation:
            return "validation";
        case ErrorCode::io:
            return "io";
    }
    return "unknown";
}

}  // namespace phaseconv
