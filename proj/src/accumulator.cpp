// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/accumulator.hpp"

#include <chrono>
#include <cstring>

#include "epbc/encoding.hpp"
#include "epbc/errors.hpp"

namespace epbc {

namespace {

constexpr char kParamsMagic[4] = {'E', 'P', 'B', 'C'};
constexpr std::uint8_t kParamsVersion = 1;

// Exponent preimage: block bytes followed by the 1-based position as 8
// big-endian bytes. The position suffix pins each block to its slot.
Bytes exponent_preimage(std::span<const std::uint8_t> block_bytes, std::uint64_t position) {
    Bytes preimage(block_bytes.begin(), block_bytes.end());
    for (int shift = 56; shift >= 0; shift -= 8) {
        preimage.push_back(static_cast<std::uint8_t>(position >> shift));
    }
    return preimage;
}

}  // namespace

std::size_t PublicParams::modulus_bytes() const {
    return (mpz_sizeinbase(modulus_N.get_mpz_t(), 2) + 7) / 8;
}

Bytes PublicParams::encode() const {
    ByteWriter w;
    w.raw(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(kParamsMagic), sizeof(kParamsMagic)));
    w.u8(kParamsVersion);
    w.u8(static_cast<std::uint8_t>(hash_id));
    w.bigint(modulus_N);
    w.bigint(generator_g);
    return w.take();
}

PublicParams PublicParams::decode(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Bytes magic = r.raw(4);
    if (std::memcmp(magic.data(), kParamsMagic, 4) != 0) {
        throw Error(ErrorCode::MalformedEncoding, "bad params magic");
    }
    if (r.u8() != kParamsVersion) {
        throw Error(ErrorCode::MalformedEncoding, "unsupported params version");
    }
    PublicParams params;
    std::uint8_t hash_id = r.u8();
    if (hash_id != static_cast<std::uint8_t>(HashId::Sha256)) {
        throw Error(ErrorCode::MalformedEncoding, "unsupported hash id");
    }
    params.hash_id = HashId::Sha256;
    params.modulus_N = r.bigint();
    params.generator_g = r.bigint();
    r.expect_end();
    params.check_invariants();
    return params;
}

Hash256 PublicParams::reference_hash() const {
    return ops::sha256(encode());
}

void PublicParams::check_invariants() const {
    if (modulus_N <= 2 || mpz_even_p(modulus_N.get_mpz_t())) {
        throw Error(ErrorCode::MalformedEncoding, "modulus must be odd and > 2");
    }
    if (generator_g <= 1 || generator_g >= modulus_N) {
        throw Error(ErrorCode::MalformedEncoding, "generator out of range");
    }
    mpz_class d;
    mpz_gcd(d.get_mpz_t(), generator_g.get_mpz_t(), modulus_N.get_mpz_t());
    if (d != 1) {
        throw Error(ErrorCode::MalformedEncoding, "generator not a unit mod N");
    }
}

Bytes MembershipProof::encode() const {
    ByteWriter w;
    w.bigint(p1.value);
    w.bigint(p2);
    return w.take();
}

MembershipProof MembershipProof::decode(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    MembershipProof proof;
    proof.p1.value = r.bigint();
    proof.p2 = r.bigint();
    r.expect_end();
    return proof;
}

Summary empty_summary(const PublicParams& params) {
    return Summary{params.generator_g, 0};
}

BlockExponent hash_to_exponent(std::span<const std::uint8_t> block_bytes,
                               std::uint64_t position) {
    if (position == 0) {
        throw Error(ErrorCode::IndexOutOfRange, "positions are 1-based");
    }
    Hash256 digest = ops::sha256(exponent_preimage(block_bytes, position));
    mpz_class value = bigint_from_magnitude(digest);
    if (value == 0) {
        throw Error(ErrorCode::ZeroExponent, "hash output is zero");
    }
    return BlockExponent{std::move(value)};
}

Summary summary_append(const Summary& prev, const BlockExponent& exponent,
                       const PublicParams& params) {
    return Summary{ops::mod_exp(prev.value, exponent.value, params.modulus_N),
                   prev.height + 1};
}

MembershipProof prove_naive(std::span<const Bytes> blocks, std::uint64_t index,
                            const PublicParams& params,
                            std::span<const mpz_class> cached_prefix_exponents) {
    const std::uint64_t n = blocks.size();
    if (index == 0 || index > n) {
        throw Error(ErrorCode::IndexOutOfRange, "proof index outside chain");
    }
    const bool use_cache = cached_prefix_exponents.size() >= index - 1;

    MembershipProof proof;
    proof.p1 = hash_to_exponent(blocks[index - 1], index);

    mpz_class product = 1;
    for (std::uint64_t k = 1; k < index; ++k) {
        if (use_cache) {
            ops::mul_into(product, cached_prefix_exponents[k - 1]);
        } else {
            ops::mul_into(product, hash_to_exponent(blocks[k - 1], k).value);
        }
    }
    for (std::uint64_t k = index + 1; k <= n; ++k) {
        ops::mul_into(product, hash_to_exponent(blocks[k - 1], k).value);
    }
    proof.p2 = ops::mod_exp(params.generator_g, product, params.modulus_N);
    return proof;
}

bool verify_proof(std::span<const std::uint8_t> block_bytes, std::uint64_t position,
                  const MembershipProof& proof, const Summary& summary,
                  const PublicParams& params) {
    if (position == 0) return false;
    if (proof.p2 <= 0 || proof.p2 >= params.modulus_N) return false;
    BlockExponent expected = hash_to_exponent(block_bytes, position);
    if (proof.p1.value != expected.value) return false;
    return ops::mod_exp(proof.p2, proof.p1.value, params.modulus_N) == summary.value;
}

DevSetupResult dev_setup(unsigned bits, std::optional<std::uint64_t> seed) {
    if (bits < 16 || bits % 2 != 0) {
        throw Error(ErrorCode::PrimalityFailure, "modulus size must be an even number >= 16");
    }
    std::uint64_t effective_seed = seed.value_or(static_cast<std::uint64_t>(
        std::chrono::steady_clock::now().time_since_epoch().count()));
    Rng rng(effective_seed);

    const unsigned half = bits / 2;
    const int kMaxAttempts = 10000;

    auto random_prime = [&](const mpz_class& avoid) {
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            mpz_class candidate = rng.uniform_bits(half);
            // Top two bits forced so p*q has exactly `bits` bits.
            mpz_setbit(candidate.get_mpz_t(), half - 1);
            mpz_setbit(candidate.get_mpz_t(), half - 2);
            mpz_setbit(candidate.get_mpz_t(), 0);
            if (candidate == avoid) continue;
            if (mpz_probab_prime_p(candidate.get_mpz_t(), 40) > 0) return candidate;
        }
        throw Error(ErrorCode::PrimalityFailure, "no prime found in attempt budget");
    };

    DevSetupResult result;
    result.p = random_prime(0);
    result.q = random_prime(result.p);
    result.params.modulus_N = result.p * result.q;
    result.params.hash_id = HashId::Sha256;

    // g = r^2 mod N for a random unit r: a quadratic residue, so g carries
    // no order-2 component.
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        mpz_class r = rng.uniform_below(result.params.modulus_N);
        mpz_class d;
        mpz_gcd(d.get_mpz_t(), r.get_mpz_t(), result.params.modulus_N.get_mpz_t());
        if (d != 1) continue;
        mpz_class g = (r * r) % result.params.modulus_N;
        if (g <= 1) continue;
        result.params.generator_g = g;
        break;
    }
    result.params.check_invariants();
    return result;
}

}  // namespace epbc
