#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qus {

enum class ErrorCode {
    invalid_argument,
    non_finite_input,
    payload_length_mismatch,
    missing_header_field,
    undersampled_frame,
    bad_schema,
    io_error,
    empty_mask,
    disconnected_mask,
    shape_mismatch,
    non_normalizable_burr,
    degenerate_histogram,
    lesion_out_of_bounds,
    degenerate_reference,
    single_class,
    not_converged,
    zero_rank_variance,
    zero_variance_feature,
    scorer_mismatch,
    config_error,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) {
        throw Error(code, what);
    }
}

}  // namespace qus
