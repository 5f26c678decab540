// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/bytes.hpp"

#include "epbc/errors.hpp"

namespace epbc {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

std::string to_hex(std::span<const std::uint8_t> data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0F]);
    }
    return out;
}

Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) {
        throw Error(ErrorCode::MalformedEncoding, "odd-length hex string");
    }
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_value(hex[i]);
        int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            throw Error(ErrorCode::MalformedEncoding, "invalid hex digit");
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ZeroExponent: return "ZeroExponent";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::PrimalityFailure: return "PrimalityFailure";
        case ErrorCode::MalformedEncoding: return "MalformedEncoding";
        case ErrorCode::InvalidLink: return "InvalidLink";
        case ErrorCode::InvalidPoW: return "InvalidPoW";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::CapacityExceeded: return "CapacityExceeded";
        case ErrorCode::TreeOutOfSync: return "TreeOutOfSync";
        case ErrorCode::ExhaustedAttempts: return "ExhaustedAttempts";
        case ErrorCode::NonUnitWitness: return "NonUnitWitness";
        case ErrorCode::NoMajority: return "NoMajority";
        case ErrorCode::PeerUnreachable: return "PeerUnreachable";
        case ErrorCode::PositionBeyondSummary: return "PositionBeyondSummary";
        case ErrorCode::CounterOverflow: return "CounterOverflow";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace epbc
