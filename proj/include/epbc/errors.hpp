// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef EPBC_ERRORS_HPP
#define EPBC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace epbc {

enum class ErrorCode {
    ZeroExponent,
    IndexOutOfRange,
    PrimalityFailure,
    MalformedEncoding,
    InvalidLink,
    InvalidPoW,
    NotFound,
    CapacityExceeded,
    TreeOutOfSync,
    ExhaustedAttempts,
    NonUnitWitness,
    NoMajority,
    PeerUnreachable,
    PositionBeyondSummary,
    CounterOverflow,
    IoFailure,
    Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace epbc

#endif
