// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/ceremony.hpp"

#include <cstring>
#include <fstream>

#include "epbc/encoding.hpp"
#include "epbc/errors.hpp"

namespace epbc {

namespace {

constexpr char kTranscriptMagic[7] = {'E', 'P', 'B', 'C', 'C', 'E', 'R'};
constexpr std::uint8_t kTranscriptVersion = 1;

unsigned ceil_log2(std::uint32_t v) {
    unsigned bits = 0;
    std::uint32_t x = v - 1;
    while (x > 0) {
        ++bits;
        x >>= 1;
    }
    return bits;
}

mpz_class share_sum(std::span<const PartyShare> shares, bool p_side) {
    mpz_class sum = 0;
    for (const PartyShare& s : shares) {
        sum += p_side ? s.p_share : s.q_share;
    }
    return sum;
}

}  // namespace

Bytes CeremonyTranscript::serialize() const {
    ByteWriter w;
    w.raw(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(kTranscriptMagic), sizeof(kTranscriptMagic)));
    w.u8(kTranscriptVersion);
    w.u32(parties);
    w.bigint(candidate_N);
    w.u8(accepted ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(rounds.size()));
    for (const BiprimalityRound& round : rounds) {
        w.bigint(round.witness_x);
        w.u32(static_cast<std::uint32_t>(round.party_terms.size()));
        for (const mpz_class& term : round.party_terms) {
            w.bigint(term);
        }
        w.u8(round.passed ? 1 : 0);
    }
    return w.take();
}

CeremonyTranscript CeremonyTranscript::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Bytes magic = r.raw(sizeof(kTranscriptMagic));
    if (std::memcmp(magic.data(), kTranscriptMagic, sizeof(kTranscriptMagic)) != 0) {
        throw Error(ErrorCode::MalformedEncoding, "bad transcript magic");
    }
    if (r.u8() != kTranscriptVersion) {
        throw Error(ErrorCode::MalformedEncoding, "unsupported transcript version");
    }
    CeremonyTranscript t;
    t.parties = r.u32();
    t.candidate_N = r.bigint();
    t.accepted = r.u8() != 0;
    std::uint32_t round_count = r.u32();
    t.rounds.reserve(round_count);
    for (std::uint32_t i = 0; i < round_count; ++i) {
        BiprimalityRound round;
        round.witness_x = r.bigint();
        std::uint32_t terms = r.u32();
        round.party_terms.reserve(terms);
        for (std::uint32_t j = 0; j < terms; ++j) {
            round.party_terms.push_back(r.bigint());
        }
        round.passed = r.u8() != 0;
        t.rounds.push_back(std::move(round));
    }
    r.expect_end();
    return t;
}

void CeremonyTranscript::save(const std::string& path) const {
    Bytes data = serialize();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    }
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw Error(ErrorCode::IoFailure, "short write to " + path);
    }
}

CeremonyTranscript CeremonyTranscript::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path);
    }
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(data);
}

BiprimalityRound biprimality_round(std::span<const PartyShare> shares, const mpz_class& N,
                                   const mpz_class& witness_x) {
    mpz_class d;
    mpz_gcd(d.get_mpz_t(), witness_x.get_mpz_t(), N.get_mpz_t());
    if (d != 1) {
        throw Error(ErrorCode::NonUnitWitness, "witness shares a factor with N");
    }

    BiprimalityRound round;
    round.witness_x = witness_x;
    mpz_class combined = 1;
    for (const PartyShare& share : shares) {
        mpz_class term = ops::mod_exp(witness_x, share.p_share + share.q_share, N);
        combined = combined * term % N;
        round.party_terms.push_back(std::move(term));
    }
    mpz_class expected = ops::mod_exp(witness_x, N + 1, N);
    round.passed = (combined == expected);
    return round;
}

bool passes_trial_division(const mpz_class& N, unsigned bound) {
    // Checking every small integer is equivalent to checking every small
    // prime: a composite divisor implies an earlier prime divisor.
    for (unsigned long d = 2; d < bound; d = d == 2 ? 3 : d + 2) {
        if (N == d) return true;
        if (mpz_divisible_ui_p(N.get_mpz_t(), d)) {
            return false;
        }
    }
    return true;
}

bool test_candidate(std::span<const PartyShare> shares, const mpz_class& N,
                    unsigned rounds, unsigned trial_division_bound, Rng& rng,
                    CeremonyTranscript& transcript) {
    transcript.parties = static_cast<std::uint32_t>(shares.size());
    transcript.candidate_N = N;
    transcript.rounds.clear();
    transcript.accepted = false;

    if (!passes_trial_division(N, trial_division_bound)) {
        return false;
    }
    for (unsigned i = 0; i < rounds; ++i) {
        // Witness in [2, N-1]; non-unit witnesses expose a factor and kill
        // the candidate outright.
        mpz_class x = rng.uniform_below(N - 3) + 2;
        BiprimalityRound round;
        try {
            round = biprimality_round(shares, N, x);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NonUnitWitness) return false;
            throw;
        }
        bool passed = round.passed;
        transcript.rounds.push_back(std::move(round));
        if (!passed) {
            return false;
        }
    }
    transcript.accepted = true;
    return true;
}

CeremonyResult run_ceremony(const CeremonyOptions& options, std::uint64_t seed) {
    if (options.parties < 2) {
        throw Error(ErrorCode::Internal, "need at least two parties");
    }
    if (options.bits < 16 || options.bits % 2 != 0) {
        throw Error(ErrorCode::Internal, "modulus size must be an even number >= 16");
    }

    Rng rng(seed);
    const unsigned half = options.bits / 2;
    if (half < ceil_log2(options.parties) + 4) {
        throw Error(ErrorCode::Internal, "modulus too small for this many parties");
    }

    // Shares are drawn from [low, low + span) chosen so each sum lands in
    // [3 * 2^(half-2), 2^half); then N = PQ has exactly `bits` bits, the way
    // forcing the two top bits does for a single-party modulus.
    mpz_class sum_floor = mpz_class(3) << (half - 2);
    mpz_class low = (sum_floor + options.parties - 1) / options.parties;
    mpz_class span = (mpz_class(1) << (half - 2)) / options.parties;

    auto draw_shares = [&](bool p_side, std::vector<PartyShare>& shares) {
        for (std::uint32_t i = 0; i < options.parties; ++i) {
            mpz_class v = low + rng.uniform_below(span);
            (p_side ? shares[i].p_share : shares[i].q_share) = std::move(v);
        }
    };

    // Draw each side until its sum is prime. The primality check is the
    // simulation oracle: it keeps the retry count bounded without changing
    // what the public protocol later verifies.
    auto draw_prime_side = [&](bool p_side, std::vector<PartyShare>& shares,
                               unsigned& attempts) {
        for (; attempts < options.max_attempts; ++attempts) {
            draw_shares(p_side, shares);
            mpz_class sum = share_sum(shares, p_side);
            if (mpz_probab_prime_p(sum.get_mpz_t(), 30) > 0) return sum;
        }
        throw Error(ErrorCode::ExhaustedAttempts, "no prime share sum found");
    };

    std::vector<PartyShare> shares(options.parties);
    for (std::uint32_t i = 0; i < options.parties; ++i) {
        shares[i].party_id = i;
    }

    unsigned attempts = 0;
    CeremonyTranscript transcript;
    while (attempts < options.max_attempts) {
        mpz_class P = draw_prime_side(true, shares, attempts);
        mpz_class Q = draw_prime_side(false, shares, attempts);
        ++attempts;
        if (P == Q) continue;
        mpz_class N = P * Q;
        if (mpz_sizeinbase(N.get_mpz_t(), 2) != options.bits) continue;
        if (test_candidate(shares, N, options.test_rounds, options.trial_division_bound,
                           rng, transcript)) {
            CeremonyResult result;
            result.params.modulus_N = std::move(N);
            result.params.hash_id = HashId::Sha256;
            for (;;) {
                mpz_class r = rng.uniform_below(result.params.modulus_N);
                mpz_class d;
                mpz_gcd(d.get_mpz_t(), r.get_mpz_t(), result.params.modulus_N.get_mpz_t());
                if (d != 1) continue;
                mpz_class g = (r * r) % result.params.modulus_N;
                if (g <= 1) continue;
                result.params.generator_g = std::move(g);
                break;
            }
            result.params.check_invariants();
            result.transcript = std::move(transcript);
            return result;
        }
    }
    throw Error(ErrorCode::ExhaustedAttempts, "ceremony attempt budget exhausted");
}

}  // namespace epbc
