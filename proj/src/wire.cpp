// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/wire.hpp"

#include "epbc/encoding.hpp"
#include "epbc/errors.hpp"

namespace epbc::wire {

Message make_get_summary() {
    Message m;
    m.type = MsgType::GetSummary;
    return m;
}

Message make_get_proof(std::uint64_t index) {
    Message m;
    m.type = MsgType::GetProof;
    m.index = index;
    return m;
}

Message make_get_tx(const Hash256& txid) {
    Message m;
    m.type = MsgType::GetTx;
    m.txid = txid;
    return m;
}

Message make_summary(const mpz_class& value, std::uint64_t height) {
    Message m;
    m.type = MsgType::Summary;
    m.summary_value = value;
    m.height = height;
    return m;
}

Message make_error(std::uint16_t code, std::string message) {
    Message m;
    m.type = MsgType::Error;
    m.error_code = code;
    m.error_message = std::move(message);
    return m;
}

Bytes encode_frame(const Message& msg) {
    ByteWriter payload;
    switch (msg.type) {
        case MsgType::GetSummary:
            break;
        case MsgType::GetProof:
            payload.u64(msg.index);
            break;
        case MsgType::GetTx:
            payload.raw(msg.txid);
            break;
        case MsgType::Summary:
            payload.bigint(msg.summary_value);
            payload.u64(msg.height);
            break;
        case MsgType::Proof:
        case MsgType::TxProof:
            payload.var_bytes(msg.block_bytes);
            payload.u64(msg.index);
            payload.bigint(msg.p1);
            payload.bigint(msg.p2);
            if (msg.type == MsgType::TxProof) {
                payload.u32(msg.tx_offset);
            }
            break;
        case MsgType::Error: {
            payload.u16(msg.error_code);
            payload.raw(std::span<const std::uint8_t>(
                reinterpret_cast<const std::uint8_t*>(msg.error_message.data()),
                msg.error_message.size()));
            break;
        }
    }

    ByteWriter frame;
    frame.u32(static_cast<std::uint32_t>(1 + payload.bytes().size()));
    frame.u8(static_cast<std::uint8_t>(msg.type));
    frame.raw(payload.bytes());
    return frame.take();
}

Message decode_frame(std::span<const std::uint8_t> frame) {
    ByteReader r(frame);
    std::uint32_t length = r.u32();
    if (length == 0 || length > kMaxFrameSize) {
        throw Error(epbc::ErrorCode::MalformedEncoding, "bad frame length");
    }
    if (r.remaining() != length) {
        throw Error(epbc::ErrorCode::MalformedEncoding, "frame length mismatch");
    }

    Message msg;
    std::uint8_t type = r.u8();
    switch (static_cast<MsgType>(type)) {
        case MsgType::GetSummary:
            msg.type = MsgType::GetSummary;
            break;
        case MsgType::GetProof:
            msg.type = MsgType::GetProof;
            msg.index = r.u64();
            break;
        case MsgType::GetTx:
            msg.type = MsgType::GetTx;
            msg.txid = r.hash256();
            break;
        case MsgType::Summary:
            msg.type = MsgType::Summary;
            msg.summary_value = r.bigint();
            msg.height = r.u64();
            break;
        case MsgType::Proof:
        case MsgType::TxProof:
            msg.type = static_cast<MsgType>(type);
            msg.block_bytes = r.var_bytes();
            msg.index = r.u64();
            msg.p1 = r.bigint();
            msg.p2 = r.bigint();
            if (msg.type == MsgType::TxProof) {
                msg.tx_offset = r.u32();
            }
            break;
        case MsgType::Error: {
            msg.type = MsgType::Error;
            msg.error_code = r.u16();
            Bytes text = r.raw(r.remaining());
            msg.error_message.assign(text.begin(), text.end());
            break;
        }
        default:
            throw Error(epbc::ErrorCode::MalformedEncoding,
                        "unknown message type " + std::to_string(type));
    }
    r.expect_end();
    return msg;
}

std::optional<Bytes> extract_frame(std::span<const std::uint8_t> buffer,
                                   std::size_t& consumed) {
    consumed = 0;
    if (buffer.size() < 4) return std::nullopt;
    std::uint32_t length = 0;
    for (int i = 0; i < 4; ++i) length = (length << 8) | buffer[i];
    if (length == 0 || length > kMaxFrameSize) {
        throw Error(epbc::ErrorCode::MalformedEncoding, "bad frame length");
    }
    if (buffer.size() < 4u + length) return std::nullopt;
    consumed = 4u + length;
    return Bytes(buffer.begin(), buffer.begin() + consumed);
}

}  // namespace epbc::wire
