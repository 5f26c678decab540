// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/encoding.hpp"

#include <cstring>
#include <limits>

namespace epbc {

void ByteWriter::u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void ByteWriter::u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void ByteWriter::raw(std::span<const std::uint8_t> data) {
    out_.insert(out_.end(), data.begin(), data.end());
}

void ByteWriter::var_bytes(std::span<const std::uint8_t> data) {
    if (data.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::MalformedEncoding, "field too large for 32-bit length prefix");
    }
    u32(static_cast<std::uint32_t>(data.size()));
    raw(data);
}

void ByteWriter::bigint(const mpz_class& v) {
    var_bytes(bigint_magnitude(v));
}

void ByteWriter::bigint_fixed(const mpz_class& v, std::size_t width) {
    Bytes mag = bigint_magnitude(v);
    if (mag.size() > width) {
        throw Error(ErrorCode::MalformedEncoding, "value wider than fixed field");
    }
    Bytes padded(width - mag.size(), 0);
    padded.insert(padded.end(), mag.begin(), mag.end());
    var_bytes(padded);
}

void ByteReader::need(std::size_t n) const {
    if (remaining() < n) {
        throw Error(ErrorCode::MalformedEncoding, "truncated input");
    }
}

std::uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
    need(2);
    std::uint16_t v = (static_cast<std::uint16_t>(data_[pos_]) << 8) | data_[pos_ + 1];
    pos_ += 2;
    return v;
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += 8;
    return v;
}

Bytes ByteReader::raw(std::size_t n) {
    need(n);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
}

Hash256 ByteReader::hash256() {
    need(32);
    Hash256 out;
    std::memcpy(out.data(), data_.data() + pos_, 32);
    pos_ += 32;
    return out;
}

Bytes ByteReader::var_bytes() {
    std::uint32_t len = u32();
    return raw(len);
}

mpz_class ByteReader::bigint() {
    Bytes mag = var_bytes();
    return bigint_from_magnitude(mag);
}

void ByteReader::expect_end() const {
    if (!empty()) {
        throw Error(ErrorCode::MalformedEncoding, "trailing bytes");
    }
}

Bytes bigint_magnitude(const mpz_class& v) {
    if (sgn(v) < 0) {
        throw Error(ErrorCode::MalformedEncoding, "negative big integer");
    }
    if (sgn(v) == 0) return {};
    std::size_t count = 0;
    Bytes out((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
    mpz_export(out.data(), &count, 1 /*most significant word first*/, 1, 1, 0, v.get_mpz_t());
    out.resize(count);
    return out;
}

mpz_class bigint_from_magnitude(std::span<const std::uint8_t> data) {
    mpz_class v;
    if (!data.empty()) {
        mpz_import(v.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
    }
    return v;
}

}  // namespace epbc
