// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace gzspec {

enum class ErrorCode {
    parse_error,
    malformed_selection,
    invalid_spectral_set,
    depth_overflow,
    unsupported_spectral_shape,
    not_semi_fredholm,
    contour_too_close,
    no_convergence,
    no_separating_contour,
    conditioning,
    invalid_projection,
    degenerate_restriction,
    undefined_gamma,
    invalid_argument,
    internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

const char* error_code_name(ErrorCode code);

}  // namespace gzspec
