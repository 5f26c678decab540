// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Prover <-> light client wire protocol.
//
// Frame layout (all integers big-endian):
//   [4 bytes length = 1 + payload size][1 byte message type][payload]
//
// Message payloads:
//   GET_SUMMARY 0x01  (empty)
//   SUMMARY     0x81  bigint summary value | u64 height
//   GET_PROOF   0x02  u64 index
//   PROOF       0x82  var-bytes canonical block | u64 index | bigint p1 | bigint p2
//   GET_TX      0x03  32-byte txid
//   TX_PROOF    0x83  PROOF payload | u32 tx offset within the block
//   ERROR       0xFF  u16 code | UTF-8 message (rest of payload)
//
// bigint fields are 4-byte length followed by the minimal unsigned
// big-endian magnitude. Every request type has exactly one response type.

#ifndef EPBC_WIRE_HPP
#define EPBC_WIRE_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <gmpxx.h>

#include "epbc/accumulator.hpp"
#include "epbc/bytes.hpp"

namespace epbc::wire {

enum class MsgType : std::uint8_t {
    GetSummary = 0x01,
    GetProof = 0x02,
    GetTx = 0x03,
    Summary = 0x81,
    Proof = 0x82,
    TxProof = 0x83,
    Error = 0xFF,
};

enum ErrorCode : std::uint16_t {
    kErrUnknownType = 1,
    kErrIndexOutOfRange = 2,
    kErrTxNotFound = 3,
    kErrInternal = 4,
};

struct Message {
    MsgType type = MsgType::Error;

    // SUMMARY
    mpz_class summary_value;
    std::uint64_t height = 0;

    // GET_PROOF / PROOF / TX_PROOF
    std::uint64_t index = 0;
    Bytes block_bytes;
    mpz_class p1;
    mpz_class p2;

    // GET_TX
    Hash256 txid{};

    // TX_PROOF
    std::uint32_t tx_offset = 0;

    // ERROR
    std::uint16_t error_code = 0;
    std::string error_message;
};

Message make_get_summary();
Message make_get_proof(std::uint64_t index);
Message make_get_tx(const Hash256& txid);
Message make_summary(const mpz_class& value, std::uint64_t height);
Message make_error(std::uint16_t code, std::string message);

// Full frame including the length prefix.
Bytes encode_frame(const Message& msg);

// Decodes one complete frame. Throws Error(MalformedEncoding) on anything
// that is not a well-formed frame of a known layout; unknown message types
// surface as MalformedEncoding with the offending type preserved.
Message decode_frame(std::span<const std::uint8_t> frame);

// Stream extraction: returns the first complete frame in `buffer` and sets
// `consumed`, or nullopt when more bytes are needed. The length prefix makes
// the stream self-synchronizing.
std::optional<Bytes> extract_frame(std::span<const std::uint8_t> buffer,
                                   std::size_t& consumed);

// Upper bound on accepted frame size; larger length prefixes are rejected.
constexpr std::uint32_t kMaxFrameSize = 1u << 26;

}  // namespace epbc::wire

#endif
