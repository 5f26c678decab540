// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Minimal proof-of-work blockchain the accumulator layer summarizes. Blocks
// carry a summary sidecar that is stored next to the block but never hashed:
// the sidecar of block i depends on the hash of block i, so folding it into
// the hashed bytes would be circular.

#ifndef EPBC_CHAIN_HPP
#define EPBC_CHAIN_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epbc/accumulator.hpp"
#include "epbc/bytes.hpp"

namespace epbc {

struct Transaction {
    Bytes payload;
    std::array<std::uint8_t, 32> sender_id{};
    std::uint64_t freshness_counter = 0;
    Hash256 txid{};  // hash of the three fields above; derived, never stored

    static Transaction create(Bytes payload, const std::array<std::uint8_t, 32>& sender_id,
                              std::uint64_t freshness_counter);

    bool operator==(const Transaction&) const = default;
};

struct BlockHeader {
    std::uint32_t version = 1;
    Hash256 prev_hash{};
    Hash256 tx_root{};
    std::uint64_t nonce = 0;
    std::uint8_t difficulty_bits = 0;

    bool operator==(const BlockHeader&) const = default;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;
    std::optional<Summary> summary_sidecar;  // stored alongside, never hashed

    // Canonical encoding; EXCLUDES the sidecar. decode(encode(b)) == b.
    Bytes canonical_encode() const;
    static Block canonical_decode(std::span<const std::uint8_t> data);

    bool operator==(const Block&) const = default;
};

// Flat hash over the concatenated canonical transactions.
Hash256 compute_tx_root(std::span<const Transaction> txs);

// SHA-256 of the canonical block encoding.
Hash256 block_hash(const Block& block);

// True iff the hash has at least difficulty_bits leading zero bits.
bool satisfies_pow(const Hash256& hash, std::uint8_t difficulty_bits);

// The link target of the genesis block: the hash of the parameter encoding,
// which ties a chain to the params embedded at its creation.
Hash256 genesis_prev_hash(const PublicParams& params);

// Searches nonces from zero until the hash meets the difficulty.
// difficulty_bits must be <= 24 (desk-scale cap).
Block mine_block(const Hash256& prev_hash, std::vector<Transaction> txs,
                 std::uint8_t difficulty_bits);

// Append-only chain with positions 1-based (genesis at 1). Sidecars and the
// block exponents are kept alongside the blocks; single writer, any number
// of concurrent readers of the immutable prefix.
class ChainStore {
public:
    std::uint64_t height() const { return entries_.size(); }
    const Block& block_at(std::uint64_t position) const;           // 1-based
    const Bytes& encoded_block(std::uint64_t position) const;      // canonical bytes
    const mpz_class& exponent_at(std::uint64_t position) const;    // hash(blk||pos)
    const Summary& summary_at(std::uint64_t position) const;       // sidecar
    const Summary& head_summary() const;                           // height >= 1
    Hash256 head_hash() const;                                     // height >= 1
    std::span<const mpz_class> exponents() const;                  // all positions

    // Validates the link and proof-of-work, computes the sidecar and caches
    // the exponent. Throws InvalidLink / InvalidPoW and leaves the store
    // untouched on failure.
    void append_with_summary(Block block, const PublicParams& params);

    // First block containing txid, with its 1-based position and the index
    // of the transaction within the block.
    struct TxLocation {
        std::uint64_t position;
        std::size_t tx_index;
    };
    std::optional<TxLocation> find_tx(const Hash256& txid) const;

    // Full validity pass: links, proof-of-work, tx roots, sidecars.
    void validate(const PublicParams& params) const;

    Bytes serialize() const;
    void save(const std::string& path) const;
    static ChainStore load(const std::string& path);

private:
    struct Entry {
        Block block;
        Bytes encoded;  // canonical bytes, cached
        Hash256 hash;   // block hash, cached
    };
    std::vector<Entry> entries_;
    std::vector<mpz_class> exponents_;  // parallel to entries_
};

}  // namespace epbc

#endif
