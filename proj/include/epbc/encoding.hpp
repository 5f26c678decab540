// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Canonical binary encoding helpers shared by every on-disk and on-wire
// format in the project. All integers are big-endian; big integers are
// encoded as a 4-byte length followed by the minimal unsigned magnitude.

#ifndef EPBC_ENCODING_HPP
#define EPBC_ENCODING_HPP

#include <cstdint>
#include <span>
#include <string>

#include <gmpxx.h>

#include "epbc/bytes.hpp"
#include "epbc/errors.hpp"

namespace epbc {

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void raw(std::span<const std::uint8_t> data);
    void raw(const Hash256& h) { raw(std::span<const std::uint8_t>(h.data(), h.size())); }
    // 4-byte length prefix followed by the bytes.
    void var_bytes(std::span<const std::uint8_t> data);
    // 4-byte length prefix followed by the minimal unsigned big-endian magnitude.
    void bigint(const mpz_class& v);
    // Length prefix followed by the magnitude left-padded with zeros to `width` bytes.
    void bigint_fixed(const mpz_class& v, std::size_t width);

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

// Bounds-checked reader; any overrun throws Error(MalformedEncoding).
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    Bytes raw(std::size_t n);
    Hash256 hash256();
    Bytes var_bytes();
    mpz_class bigint();

    bool empty() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }
    void expect_end() const;

private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

// Minimal unsigned big-endian magnitude (empty for zero).
Bytes bigint_magnitude(const mpz_class& v);
mpz_class bigint_from_magnitude(std::span<const std::uint8_t> data);

}  // namespace epbc

#endif
