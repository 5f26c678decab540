// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Core accumulator arithmetic: public parameters, the running chain summary,
// membership proofs over block positions, and their verification. A summary
// is a single element of Z_N*; appending block i raises the previous summary
// to the block's positioned hash. A membership proof for block i is the pair
//   p1 = hash(block_bytes || i)
//   p2 = g^(product of every other block's exponent) mod N
// and verifies with one hash plus one modular exponentiation regardless of
// the chain height.

#ifndef EPBC_ACCUMULATOR_HPP
#define EPBC_ACCUMULATOR_HPP

#include <cstdint>
#include <optional>
#include <span>

#include <gmpxx.h>

#include "epbc/bytes.hpp"
#include "epbc/mathops.hpp"

namespace epbc {

enum class HashId : std::uint8_t {
    Sha256 = 0x01,
};

struct PublicParams {
    mpz_class modulus_N;
    mpz_class generator_g;
    HashId hash_id = HashId::Sha256;

    // Bit length of a block exponent (digest size of hash_id).
    unsigned exponent_bits() const { return 256; }
    std::size_t modulus_bytes() const;

    Bytes encode() const;
    static PublicParams decode(std::span<const std::uint8_t> data);
    // SHA-256 of the canonical encoding; used as the genesis link and as the
    // params reference hash in client state files.
    Hash256 reference_hash() const;

    void check_invariants() const;  // throws Error on violation

    bool operator==(const PublicParams&) const = default;
};

struct BlockExponent {
    mpz_class value;  // >= 1, at most exponent_bits bits
};

struct Summary {
    mpz_class value;      // element of Z_N*
    std::uint64_t height = 0;  // number of blocks summarized

    bool operator==(const Summary&) const = default;
};

struct MembershipProof {
    BlockExponent p1;  // claimed hash(block_bytes || position)
    mpz_class p2;      // element of Z_N*

    Bytes encode() const;
    static MembershipProof decode(std::span<const std::uint8_t> data);
};

// Summary of the empty chain: height 0 with value g, so that the first append
// computes g^e without a special case.
Summary empty_summary(const PublicParams& params);

// SHA-256 over block_bytes followed by the position as 8 big-endian bytes,
// interpreted as a big-endian integer. block_bytes must be the canonical
// block encoding without the summary sidecar. position is 1-based.
BlockExponent hash_to_exponent(std::span<const std::uint8_t> block_bytes,
                               std::uint64_t position);

// prev.value ^ exponent mod N, height + 1.
Summary summary_append(const Summary& prev, const BlockExponent& exponent,
                       const PublicParams& params);

// Membership proof for blocks[index-1] (index is 1-based) under the summary
// of the whole list. p2 is g raised to the product of every other block's
// exponent; the division by the proven block's exponent that the formula
// suggests is realized by omitting that exponent from the product. When the caller has
// already computed the exponents of blocks 1..index-1 (a prover that built
// sidecars incrementally keeps them), cached_prefix_exponents supplies them
// and the prefix is not rehashed; the proof bytes are identical either way.
MembershipProof prove_naive(std::span<const Bytes> blocks, std::uint64_t index,
                            const PublicParams& params,
                            std::span<const mpz_class> cached_prefix_exponents = {});

// Accept iff proof.p1 matches the positioned hash of block_bytes and
// proof.p2 ^ proof.p1 mod N equals summary.value. Constant work: one hash,
// one modular exponentiation. Forgeries return false, never throw.
bool verify_proof(std::span<const std::uint8_t> block_bytes, std::uint64_t position,
                  const MembershipProof& proof, const Summary& summary,
                  const PublicParams& params);

// Single-party parameter generation for tests and local experiments. The
// trust-minimized path is the ceremony module; here the factors are handed
// back so test oracles can compute phi(N), and production callers must
// discard them.
struct DevSetupResult {
    PublicParams params;
    mpz_class p;  // test-only capability
    mpz_class q;  // test-only capability
};

DevSetupResult dev_setup(unsigned bits, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace epbc

#endif
