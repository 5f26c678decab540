// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/lightclient.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "epbc/encoding.hpp"
#include "epbc/errors.hpp"

namespace epbc {

namespace {

constexpr char kClientMagic[7] = {'E', 'P', 'B', 'C', 'C', 'L', 'I'};
constexpr std::uint8_t kClientVersion = 1;

}  // namespace

ClientState::ClientState(PublicParams params, unsigned confirmation_depth)
    : params_(std::move(params)), depth_(confirmation_depth) {
    params_.check_invariants();
    trusted_ = empty_summary(params_);
}

Transaction ClientState::next_outgoing_tx(Bytes payload) {
    if (counter_ == UINT64_MAX) {
        throw Error(ErrorCode::CounterOverflow, "freshness counter exhausted");
    }
    Transaction tx = Transaction::create(std::move(payload), sender_id_, counter_);
    ++counter_;
    return tx;
}

Bytes ClientState::serialize() const {
    ByteWriter w;
    w.raw(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(kClientMagic), sizeof(kClientMagic)));
    w.u8(kClientVersion);
    w.raw(params_.reference_hash());
    // Value padded to the modulus width: the state size is independent of
    // the chain.
    w.bigint_fixed(trusted_.value, params_.modulus_bytes());
    w.u64(trusted_.height);
    w.u64(counter_);
    return w.take();
}

ClientState ClientState::deserialize(std::span<const std::uint8_t> data,
                                     const PublicParams& params,
                                     unsigned confirmation_depth) {
    ByteReader r(data);
    Bytes magic = r.raw(sizeof(kClientMagic));
    if (std::memcmp(magic.data(), kClientMagic, sizeof(kClientMagic)) != 0) {
        throw Error(ErrorCode::MalformedEncoding, "bad client state magic");
    }
    if (r.u8() != kClientVersion) {
        throw Error(ErrorCode::MalformedEncoding, "unsupported client state version");
    }
    Hash256 ref = r.hash256();
    if (ref != params.reference_hash()) {
        throw Error(ErrorCode::MalformedEncoding, "state belongs to different parameters");
    }
    ClientState state(params, confirmation_depth);
    Bytes value = r.var_bytes();
    state.trusted_.value = bigint_from_magnitude(value);
    state.trusted_.height = r.u64();
    state.counter_ = r.u64();
    r.expect_end();
    return state;
}

void ClientState::save(const std::string& path) const {
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

ClientState ClientState::load(const std::string& path, const PublicParams& params,
                              unsigned confirmation_depth) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path);
    }
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(data, params, confirmation_depth);
}

namespace {

// Spot check: ask the peer for the proof of one block and verify it against
// the candidate summary.
bool spot_check(PeerChannel& peer, const PublicParams& params, const Summary& candidate,
                std::uint64_t index) {
    wire::Message reply = peer.request(wire::make_get_proof(index));
    if (reply.type != wire::MsgType::Proof) return false;
    if (reply.index != index) return false;
    MembershipProof proof;
    proof.p1.value = reply.p1;
    proof.p2 = reply.p2;
    return verify_proof(reply.block_bytes, index, proof, candidate, params);
}

}  // namespace

IdentifyOutcome identify_chain(std::span<PeerChannel* const> peers,
                               const PublicParams& params, const IdentifyOptions& options,
                               Rng& rng) {
    if (options.sample_l == 0 || options.sample_l > peers.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "sample size exceeds peer count");
    }

    // Sample without replacement.
    std::vector<std::size_t> order(peers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        std::size_t j = i + rng.uniform_u64(order.size() - i);
        std::swap(order[i], order[j]);
    }
    order.resize(options.sample_l);

    IdentifyOutcome outcome;
    for (std::size_t peer_index : order) {
        PeerVerdict verdict;
        verdict.peer_index = peer_index;
        PeerChannel& peer = *peers[peer_index];
        try {
            wire::Message summary_reply = peer.request(wire::make_get_summary());
            if (summary_reply.type != wire::MsgType::Summary) {
                outcome.verdicts.push_back(verdict);
                continue;
            }
            verdict.reachable = true;
            verdict.claimed = Summary{summary_reply.summary_value, summary_reply.height};

            if (verdict.claimed.height == 0) {
                outcome.verdicts.push_back(verdict);
                continue;
            }

            // Uniform random positions without replacement; when the claimed
            // chain is shorter than k, every position is checked.
            std::size_t checks = std::min<std::uint64_t>(options.spot_checks_k,
                                                         verdict.claimed.height);
            std::vector<std::uint64_t> picks;
            while (picks.size() < checks) {
                std::uint64_t index = 1 + rng.uniform_u64(verdict.claimed.height);
                if (std::find(picks.begin(), picks.end(), index) == picks.end()) {
                    picks.push_back(index);
                }
            }
            bool all_passed = true;
            for (std::uint64_t index : picks) {
                if (!spot_check(peer, params, verdict.claimed, index)) {
                    all_passed = false;
                    break;
                }
            }
            verdict.checks_passed = all_passed;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PeerUnreachable &&
                e.code() != ErrorCode::MalformedEncoding) {
                throw;
            }
            verdict.reachable = false;
        }
        outcome.verdicts.push_back(verdict);
    }

    // Strict majority over the sampled peers, counting only candidates that
    // survived their spot checks; ties fail closed.
    std::vector<std::pair<Summary, std::size_t>> tally;
    for (const PeerVerdict& v : outcome.verdicts) {
        if (!v.reachable || !v.checks_passed) continue;
        auto it = std::find_if(tally.begin(), tally.end(),
                               [&](const auto& entry) { return entry.first == v.claimed; });
        if (it == tally.end()) {
            tally.emplace_back(v.claimed, 1);
        } else {
            ++it->second;
        }
    }
    for (const auto& [summary, count] : tally) {
        if (count * 2 > options.sample_l) {
            outcome.adopted = summary;
            return outcome;
        }
    }
    throw Error(ErrorCode::NoMajority, "no summary held by a strict majority");
}

bool verify_block(const ClientState& client, std::span<const std::uint8_t> block_bytes,
                  std::uint64_t position, const MembershipProof& proof) {
    if (position == 0 || position > client.trusted_summary().height) {
        throw Error(ErrorCode::PositionBeyondSummary,
                    "position not covered by the trusted summary");
    }
    return verify_proof(block_bytes, position, proof, client.trusted_summary(),
                        client.params());
}

TxVerdict verify_transaction(const ClientState& client, PeerChannel& node,
                             const Hash256& txid) {
    wire::Message reply = node.request(wire::make_get_tx(txid));
    if (reply.type == wire::MsgType::Error) {
        return TxVerdict::Invalid;
    }
    if (reply.type != wire::MsgType::TxProof) {
        return TxVerdict::Invalid;
    }
    const std::uint64_t n = client.trusted_summary().height;
    if (reply.index == 0 || reply.index > n) {
        return TxVerdict::Invalid;
    }

    MembershipProof proof;
    proof.p1.value = reply.p1;
    proof.p2 = reply.p2;
    if (!verify_proof(reply.block_bytes, reply.index, proof, client.trusted_summary(),
                      client.params())) {
        return TxVerdict::Invalid;
    }

    // The block bytes are trusted now; the transaction must really be there.
    // Decoding recomputes every txid from the raw fields, so a fabricated id
    // cannot survive this check.
    Block block;
    try {
        block = Block::canonical_decode(reply.block_bytes);
    } catch (const Error&) {
        return TxVerdict::Invalid;
    }
    bool present = false;
    if (reply.tx_offset < block.transactions.size() &&
        block.transactions[reply.tx_offset].txid == txid) {
        present = true;
    } else {
        for (const Transaction& tx : block.transactions) {
            if (tx.txid == txid) {
                present = true;
                break;
            }
        }
    }
    if (!present) {
        return TxVerdict::Invalid;
    }
    return n - reply.index >= client.confirmation_depth() ? TxVerdict::Confirmed
                                                          : TxVerdict::Unconfirmed;
}

const char* tx_verdict_name(TxVerdict v) {
    switch (v) {
        case TxVerdict::Confirmed: return "confirmed";
        case TxVerdict::Unconfirmed: return "unconfirmed";
        case TxVerdict::Invalid: return "invalid";
    }
    return "unknown";
}

bool FreshnessLedger::accept(const Transaction& tx) {
    auto it = last_seen_.find(tx.sender_id);
    if (it != last_seen_.end() && tx.freshness_counter <= it->second) {
        return false;
    }
    last_seen_[tx.sender_id] = tx.freshness_counter;
    return true;
}

}  // namespace epbc
