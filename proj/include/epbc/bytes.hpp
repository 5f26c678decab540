// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef EPBC_BYTES_HPP
#define EPBC_BYTES_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace epbc {

using Bytes = std::vector<std::uint8_t>;
using Hash256 = std::array<std::uint8_t, 32>;

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(const std::string& hex);

inline std::string to_hex(const Hash256& h) {
    return to_hex(std::span<const std::uint8_t>(h.data(), h.size()));
}

}  // namespace epbc

#endif
