// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Constant-storage client. The client keeps only the public parameters, one
// trusted summary and a freshness counter; its serialized state has the same
// byte size whether the chain holds ten blocks or ten million. Chain
// identification samples peers, spot-checks their claimed summaries with
// random block proofs and adopts the strict majority.

#ifndef EPBC_LIGHTCLIENT_HPP
#define EPBC_LIGHTCLIENT_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "epbc/accumulator.hpp"
#include "epbc/chain.hpp"
#include "epbc/transport.hpp"

namespace epbc {

class ClientState {
public:
    ClientState(PublicParams params, unsigned confirmation_depth = 6);

    const PublicParams& params() const { return params_; }
    const Summary& trusted_summary() const { return trusted_; }
    std::uint64_t freshness_counter() const { return counter_; }
    unsigned confirmation_depth() const { return depth_; }

    void adopt_summary(Summary summary) { trusted_ = std::move(summary); }

    // Session identity used for outgoing transactions. Not persisted: key
    // and identity management is outside the protocol.
    void set_sender_id(const std::array<std::uint8_t, 32>& id) { sender_id_ = id; }
    const std::array<std::uint8_t, 32>& sender_id() const { return sender_id_; }

    // Emits a transaction carrying the current counter, then increments it.
    // Counters are strictly monotone across the client's lifetime.
    Transaction next_outgoing_tx(Bytes payload);

    // Fixed-size state file: magic, version, params reference hash, the
    // summary value padded to the modulus width, height, counter.
    Bytes serialize() const;
    static ClientState deserialize(std::span<const std::uint8_t> data,
                                   const PublicParams& params,
                                   unsigned confirmation_depth = 6);
    void save(const std::string& path) const;
    static ClientState load(const std::string& path, const PublicParams& params,
                            unsigned confirmation_depth = 6);

private:
    PublicParams params_;
    Summary trusted_;
    std::uint64_t counter_ = 0;
    unsigned depth_;
    std::array<std::uint8_t, 32> sender_id_{};
};

struct IdentifyOptions {
    std::size_t sample_l = 5;    // peers to sample
    std::size_t spot_checks_k = 3;  // random block proofs per candidate
};

// Protocol outcome of one candidate peer during identification.
struct PeerVerdict {
    std::size_t peer_index = 0;
    bool reachable = false;
    bool checks_passed = false;
    Summary claimed;
};

struct IdentifyOutcome {
    Summary adopted;
    std::vector<PeerVerdict> verdicts;
};

// Samples `sample_l` peers without replacement, spot-checks each candidate
// summary with `spot_checks_k` random block proofs, and returns the summary
// claimed by a strict majority (> l/2) of the sampled peers among those that
// passed all checks. Throws NoMajority when no candidate clears the bar.
IdentifyOutcome identify_chain(std::span<PeerChannel* const> peers,
                               const PublicParams& params, const IdentifyOptions& options,
                               Rng& rng);

// Verification against the client's trusted summary. Positions beyond the
// summarized height cannot be checked and throw PositionBeyondSummary.
bool verify_block(const ClientState& client, std::span<const std::uint8_t> block_bytes,
                  std::uint64_t position, const MembershipProof& proof);

enum class TxVerdict {
    Confirmed,    // proof valid, tx present, buried at least `depth` blocks
    Unconfirmed,  // proof valid, tx present, not yet deep enough
    Invalid,      // proof failed or transaction absent
};

const char* tx_verdict_name(TxVerdict v);

// Requests a TX_PROOF from the node and checks it against the trusted
// summary. Transport failures throw; protocol failures return Invalid.
TxVerdict verify_transaction(const ClientState& client, PeerChannel& node,
                             const Hash256& txid);

// Recipient-side replay guard: a transaction is fresh only if its counter
// exceeds the highest counter previously seen from the same sender.
class FreshnessLedger {
public:
    bool accept(const Transaction& tx);

private:
    std::map<std::array<std::uint8_t, 32>, std::uint64_t> last_seen_;
};

}  // namespace epbc

#endif
