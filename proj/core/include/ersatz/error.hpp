#pragma once

#include <stdexcept>
#include <string>

namespace ersatz {

/// Error with a stable machine-parsable code alongside the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr const char* invalid_dimension = "invalid-dimension";
inline constexpr const char* dimension_mismatch = "dimension-mismatch";
inline constexpr const char* grid_too_coarse = "grid-too-coarse";
inline constexpr const char* stencil_out_of_domain = "stencil-out-of-domain";
inline constexpr const char* decomposition_infeasible = "decomposition-infeasible";
inline constexpr const char* search_failed = "search-failed";
inline constexpr const char* ellipticity_violation = "ellipticity-violation";
inline constexpr const char* invalid_spec = "invalid-spec";
inline constexpr const char* refuse_to_step = "refuse-to-step";
inline constexpr const char* divergence_detected = "divergence-detected";
inline constexpr const char* insufficient_data = "insufficient-data";
inline constexpr const char* monotonicity_check_failed = "monotonicity-check-failed";
inline constexpr const char* incompatible_refinement = "incompatible-refinement";
inline constexpr const char* invalid_range = "invalid-range";
inline constexpr const char* coefficient_conditions_violated = "coefficient-conditions-violated";
inline constexpr const char* config_error = "config-error";
inline constexpr const char* io_error = "io-error";
}  // namespace errc

}  // namespace ersatz
