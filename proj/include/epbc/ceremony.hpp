// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Multi-party generation of the modulus N = (sum p_i)(sum q_i) so that no
// single party knows the factorization, plus the distributed biprimality
// test: for a random witness x the parties each reveal x^(p_i+q_i) mod N and
// the product must equal x^(N+1) mod N. The share-combination step is
// simulated honest-but-curious: a coordinator computes N from the additive
// shares, and parties never see each other's raw shares. A simulation-only
// primality oracle on the share sums bounds the retry loop; the oracle is
// not part of the protocol surface.

#ifndef EPBC_CEREMONY_HPP
#define EPBC_CEREMONY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "epbc/accumulator.hpp"
#include "epbc/mathops.hpp"

namespace epbc {

struct PartyShare {
    std::uint32_t party_id = 0;
    mpz_class p_share;
    mpz_class q_share;
};

struct BiprimalityRound {
    mpz_class witness_x;
    std::vector<mpz_class> party_terms;  // x^(p_i+q_i) mod N per party
    bool passed = false;
};

// Public record of one ceremony: candidate modulus, per-round witnesses and
// party terms, and the verdict. Contains no share material.
struct CeremonyTranscript {
    std::uint32_t parties = 0;
    mpz_class candidate_N;
    std::vector<BiprimalityRound> rounds;
    bool accepted = false;

    Bytes serialize() const;
    static CeremonyTranscript deserialize(std::span<const std::uint8_t> data);
    void save(const std::string& path) const;
    static CeremonyTranscript load(const std::string& path);
};

struct CeremonyResult {
    PublicParams params;
    CeremonyTranscript transcript;
};

struct CeremonyOptions {
    std::uint32_t parties = 3;          // >= 2
    unsigned bits = 1024;               // modulus size
    unsigned test_rounds = 40;          // biprimality rounds
    unsigned trial_division_bound = 10000;
    unsigned max_attempts = 100000;     // candidate draws before giving up
};

// One biprimality round for a given witness. Throws NonUnitWitness when
// gcd(x, N) != 1 (which itself exposes a factor, so the candidate dies).
BiprimalityRound biprimality_round(std::span<const PartyShare> shares, const mpz_class& N,
                                   const mpz_class& witness_x);

// True iff N has no prime factor below the bound.
bool passes_trial_division(const mpz_class& N, unsigned bound);

// Runs trial division plus `rounds` biprimality rounds against a candidate,
// recording every round in the transcript. Stops at the first failure.
bool test_candidate(std::span<const PartyShare> shares, const mpz_class& N,
                    unsigned rounds, unsigned trial_division_bound, Rng& rng,
                    CeremonyTranscript& transcript);

// Full ceremony: draw shares until the sums are prime (simulation oracle),
// check the modulus size, then run the public candidate tests and derive
// g = r^2 mod N. Deterministic for a fixed seed.
CeremonyResult run_ceremony(const CeremonyOptions& options, std::uint64_t seed);

}  // namespace epbc

#endif
