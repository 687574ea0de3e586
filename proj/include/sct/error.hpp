// Copyright 2026 The SCT Authors
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

#ifndef SCT_ERROR_HPP
#define SCT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace sct {

enum class Errc {
    non_hermitian_input,
    eigen_failure,
    invalid_range,
    wrong_dimension,
    dimension_mismatch,
    bad_label,
    missing_unknown,
    unknown_scenario,
    missing_symbol,
    empty_region,
    too_many_dims,
    rank_deficient,
    nonpositive_model,
    structural_singularity,
    schema_error,
    fingerprint_mismatch,
};

inline std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::non_hermitian_input: return "NonHermitianInput";
        case Errc::eigen_failure: return "EigenFailure";
        case Errc::invalid_range: return "InvalidRange";
        case Errc::wrong_dimension: return "WrongDimension";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::bad_label: return "BadLabel";
        case Errc::missing_unknown: return "MissingUnknown";
        case Errc::unknown_scenario: return "UnknownScenario";
        case Errc::missing_symbol: return "MissingSymbol";
        case Errc::empty_region: return "EmptyRegion";
        case Errc::too_many_dims: return "TooManyDims";
        case Errc::rank_deficient: return "RankDeficient";
        case Errc::nonpositive_model: return "NonpositiveModel";
        case Errc::structural_singularity: return "StructuralSingularity";
        case Errc::schema_error: return "SchemaError";
        case Errc::fingerprint_mismatch: return "FingerprintMismatch";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto its exit-code contract.
class Error : public std::runtime_error {
   public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

   private:
    Errc code_;
};

}  // namespace sct

#endif  // SCT_ERROR_HPP
