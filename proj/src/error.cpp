#include "actscan/error.hpp"

namespace actscan {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::bad_magic: return "bad-magic";
        case ErrorCode::version_mismatch: return "version-mismatch";
        case ErrorCode::truncated_payload: return "truncated-payload";
        case ErrorCode::trailing_data: return "trailing-data";
        case ErrorCode::non_finite: return "non-finite";
        case ErrorCode::io_failure: return "io-failure";
        case ErrorCode::malformed_layout: return "malformed-layout";
        case ErrorCode::malformed_input: return "malformed-input";
        case ErrorCode::dimension_mismatch: return "dimension-mismatch";
        case ErrorCode::out_of_range: return "out-of-range";
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::invariant_breach: return "invariant-breach";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

}  // namespace actscan
