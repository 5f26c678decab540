// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/mathops.hpp"

#include <openssl/evp.h>

#include "epbc/errors.hpp"

namespace epbc {

namespace ops {

namespace {
thread_local OpCounters t_counters;
}

void reset_counters() { t_counters = OpCounters{}; }

OpCounters counters() { return t_counters; }

Hash256 sha256(std::span<const std::uint8_t> data) {
    ++t_counters.hashes;
    Hash256 out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw Error(ErrorCode::Internal, "SHA-256 digest failed");
    }
    return out;
}

void mul_into(mpz_class& acc, const mpz_class& x) {
    ++t_counters.multiplications;
    acc *= x;
}

mpz_class mod_exp(const mpz_class& base, const mpz_class& exp, const mpz_class& modulus) {
    ++t_counters.modexps;
    mpz_class out;
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), modulus.get_mpz_t());
    return out;
}

}  // namespace ops

Rng::Rng(std::uint64_t seed) : stream_(0) {
    gmp_randinit_mt(state_);
    gmp_randseed_ui(state_, seed);
}

Rng::~Rng() { gmp_randclear(state_); }

mpz_class Rng::uniform_bits(unsigned bits) {
    mpz_class out;
    mpz_urandomb(out.get_mpz_t(), state_, bits);
    return out;
}

mpz_class Rng::uniform_below(const mpz_class& bound) {
    mpz_class out;
    mpz_urandomm(out.get_mpz_t(), state_, bound.get_mpz_t());
    return out;
}

std::uint64_t Rng::next_raw() {
    mpz_class v = uniform_bits(64);
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
    return out;
}

std::uint64_t Rng::uniform_u64(std::uint64_t bound) {
    if (bound == 0) return 0;
    // Rejection sampling: unbiased over [0, bound).
    std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    for (;;) {
        std::uint64_t v = next_raw();
        if (v < limit) return v % bound;
    }
}

Bytes Rng::random_bytes(std::size_t n) {
    Bytes out(n);
    for (auto& b : out) {
        b = static_cast<std::uint8_t>(uniform_u64(256));
    }
    return out;
}

}  // namespace epbc
