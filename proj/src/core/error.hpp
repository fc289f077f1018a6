// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ntcr {

// Error categories, mirrored one-to-one by the C API status codes and the
// CLI exit codes (config -> 2, stage -> 3).
enum class ErrorCode {
    InvalidArgument = 1,
    Config = 2,
    Stage = 3,
    Io = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

}  // namespace ntcr
