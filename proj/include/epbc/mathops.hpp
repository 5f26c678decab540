// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Counted arithmetic primitives. Every hash, big-integer multiplication and
// modular exponentiation performed by the protocol goes through these
// wrappers so the benchmark suite can report exact operation counts instead
// of relying on wall-clock time alone.

#ifndef EPBC_MATHOPS_HPP
#define EPBC_MATHOPS_HPP

#include <cstdint>
#include <span>

#include <gmpxx.h>

#include "epbc/bytes.hpp"

namespace epbc {

struct OpCounters {
    std::uint64_t hashes = 0;
    std::uint64_t multiplications = 0;
    std::uint64_t modexps = 0;

    OpCounters operator-(const OpCounters& rhs) const {
        return {hashes - rhs.hashes, multiplications - rhs.multiplications,
                modexps - rhs.modexps};
    }
    bool operator==(const OpCounters&) const = default;
};

namespace ops {

// Counters are thread-local; concurrent callers never observe each other.
void reset_counters();
OpCounters counters();

Hash256 sha256(std::span<const std::uint8_t> data);

// acc <- acc * x
void mul_into(mpz_class& acc, const mpz_class& x);

// base^exp mod modulus (exp >= 0)
mpz_class mod_exp(const mpz_class& base, const mpz_class& exp, const mpz_class& modulus);

}  // namespace ops

// Deterministic random source. All protocol-level randomness flows through a
// seeded Rng so simulations and ceremonies reproduce byte-identically.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    ~Rng();
    Rng(const Rng&) = delete;
    Rng& operator=(const Rng&) = delete;

    // Uniform in [0, 2^bits)
    mpz_class uniform_bits(unsigned bits);
    // Uniform in [0, bound)
    mpz_class uniform_below(const mpz_class& bound);
    std::uint64_t uniform_u64(std::uint64_t bound);  // [0, bound)
    Bytes random_bytes(std::size_t n);

private:
    std::uint64_t next_raw();

    gmp_randstate_t state_;
    std::uint64_t stream_;
};

}  // namespace epbc

#endif
