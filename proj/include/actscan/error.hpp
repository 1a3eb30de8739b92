#pragma once

#include <stdexcept>
#include <string>

namespace actscan {

// Every failure raised by the library carries one of these codes. The CLI
// maps them onto exit statuses, so keep the set small and stable.
enum class ErrorCode {
    bad_magic,
    version_mismatch,
    truncated_payload,
    trailing_data,
    non_finite,
    io_failure,
    malformed_layout,
    malformed_input,
    dimension_mismatch,
    out_of_range,
    invalid_argument,
    invariant_breach,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace actscan
