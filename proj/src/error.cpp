#include "qus/error.hpp"

namespace qus {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid argument";
        case ErrorCode::non_finite_input: return "non-finite value";
        case ErrorCode::payload_length_mismatch: return "payload length mismatch";
        case ErrorCode::missing_header_field: return "missing header field";
        case ErrorCode::undersampled_frame: return "undersampled frame";
        case ErrorCode::bad_schema: return "unknown schema";
        case ErrorCode::io_error: return "i/o error";
        case ErrorCode::empty_mask: return "empty mask";
        case ErrorCode::disconnected_mask: return "disconnected mask";
        case ErrorCode::shape_mismatch: return "shape mismatch";
        case ErrorCode::non_normalizable_burr: return "non-normalizable Burr exponent";
        case ErrorCode::degenerate_histogram: return "degenerate histogram";
        case ErrorCode::lesion_out_of_bounds: return "lesion out of bounds";
        case ErrorCode::degenerate_reference: return "degenerate reference";
        case ErrorCode::single_class: return "need both classes";
        case ErrorCode::not_converged: return "not converged";
        case ErrorCode::zero_rank_variance: return "zero rank variance";
        case ErrorCode::zero_variance_feature: return "zero-variance feature";
        case ErrorCode::scorer_mismatch: return "scorer mismatch";
        case ErrorCode::config_error: return "config error";
    }
    return "unknown error";
}

}  // namespace qus
