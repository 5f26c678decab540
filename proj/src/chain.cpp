// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/chain.hpp"

#include <cstring>
#include <fstream>

#include "epbc/encoding.hpp"
#include "epbc/errors.hpp"

namespace epbc {

namespace {

constexpr char kChainMagic[7] = {'E', 'P', 'B', 'C', 'C', 'H', 'N'};
constexpr std::uint8_t kChainVersion = 1;
constexpr std::uint8_t kMaxDifficultyBits = 24;

void encode_tx(ByteWriter& w, const Transaction& tx) {
    w.var_bytes(tx.payload);
    w.raw(std::span<const std::uint8_t>(tx.sender_id.data(), tx.sender_id.size()));
    w.u64(tx.freshness_counter);
}

Transaction decode_tx(ByteReader& r) {
    Bytes payload = r.var_bytes();
    Hash256 sender = r.hash256();
    std::uint64_t counter = r.u64();
    return Transaction::create(std::move(payload), sender, counter);
}

Bytes encode_summary(const Summary& s) {
    ByteWriter w;
    w.bigint(s.value);
    w.u64(s.height);
    return w.take();
}

Summary decode_summary(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Summary s;
    s.value = r.bigint();
    s.height = r.u64();
    r.expect_end();
    return s;
}

}  // namespace

Transaction Transaction::create(Bytes payload, const std::array<std::uint8_t, 32>& sender_id,
                                std::uint64_t freshness_counter) {
    Transaction tx;
    tx.payload = std::move(payload);
    tx.sender_id = sender_id;
    tx.freshness_counter = freshness_counter;
    ByteWriter w;
    encode_tx(w, tx);
    tx.txid = ops::sha256(w.bytes());
    return tx;
}

Bytes Block::canonical_encode() const {
    ByteWriter w;
    w.u32(header.version);
    w.raw(header.prev_hash);
    w.raw(header.tx_root);
    w.u64(header.nonce);
    w.u8(header.difficulty_bits);
    w.u32(static_cast<std::uint32_t>(transactions.size()));
    for (const Transaction& tx : transactions) {
        encode_tx(w, tx);
    }
    return w.take();
}

Block Block::canonical_decode(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Block block;
    block.header.version = r.u32();
    block.header.prev_hash = r.hash256();
    block.header.tx_root = r.hash256();
    block.header.nonce = r.u64();
    block.header.difficulty_bits = r.u8();
    std::uint32_t count = r.u32();
    block.transactions.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        block.transactions.push_back(decode_tx(r));
    }
    r.expect_end();
    if (block.header.tx_root != compute_tx_root(block.transactions)) {
        throw Error(ErrorCode::MalformedEncoding, "tx root mismatch");
    }
    return block;
}

Hash256 compute_tx_root(std::span<const Transaction> txs) {
    ByteWriter w;
    for (const Transaction& tx : txs) {
        encode_tx(w, tx);
    }
    return ops::sha256(w.bytes());
}

Hash256 block_hash(const Block& block) {
    return ops::sha256(block.canonical_encode());
}

bool satisfies_pow(const Hash256& hash, std::uint8_t difficulty_bits) {
    unsigned remaining = difficulty_bits;
    for (std::uint8_t byte : hash) {
        if (remaining == 0) return true;
        if (remaining >= 8) {
            if (byte != 0) return false;
            remaining -= 8;
        } else {
            return (byte >> (8 - remaining)) == 0;
        }
    }
    return remaining == 0;
}

Hash256 genesis_prev_hash(const PublicParams& params) {
    return params.reference_hash();
}

Block mine_block(const Hash256& prev_hash, std::vector<Transaction> txs,
                 std::uint8_t difficulty_bits) {
    if (difficulty_bits > kMaxDifficultyBits) {
        throw Error(ErrorCode::InvalidPoW, "difficulty above desk-scale cap");
    }
    Block block;
    block.header.version = 1;
    block.header.prev_hash = prev_hash;
    block.header.tx_root = compute_tx_root(txs);
    block.header.difficulty_bits = difficulty_bits;
    block.transactions = std::move(txs);
    for (std::uint64_t nonce = 0;; ++nonce) {
        block.header.nonce = nonce;
        if (satisfies_pow(block_hash(block), difficulty_bits)) {
            return block;
        }
    }
}

const Block& ChainStore::block_at(std::uint64_t position) const {
    if (position == 0 || position > entries_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "block position outside chain");
    }
    return entries_[position - 1].block;
}

const Bytes& ChainStore::encoded_block(std::uint64_t position) const {
    if (position == 0 || position > entries_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "block position outside chain");
    }
    return entries_[position - 1].encoded;
}

const mpz_class& ChainStore::exponent_at(std::uint64_t position) const {
    if (position == 0 || position > entries_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "block position outside chain");
    }
    return exponents_[position - 1];
}

const Summary& ChainStore::summary_at(std::uint64_t position) const {
    if (position == 0 || position > entries_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "block position outside chain");
    }
    return *entries_[position - 1].block.summary_sidecar;
}

const Summary& ChainStore::head_summary() const {
    if (entries_.empty()) {
        throw Error(ErrorCode::IndexOutOfRange, "empty chain has no summary");
    }
    return *entries_.back().block.summary_sidecar;
}

Hash256 ChainStore::head_hash() const {
    if (entries_.empty()) {
        throw Error(ErrorCode::IndexOutOfRange, "empty chain has no head");
    }
    return entries_.back().hash;
}

std::span<const mpz_class> ChainStore::exponents() const {
    return exponents_;
}

void ChainStore::append_with_summary(Block block, const PublicParams& params) {
    const Hash256 expected_prev =
        entries_.empty() ? genesis_prev_hash(params) : entries_.back().hash;
    if (block.header.prev_hash != expected_prev) {
        throw Error(ErrorCode::InvalidLink, "prev_hash does not match chain head");
    }
    if (block.header.tx_root != compute_tx_root(block.transactions)) {
        throw Error(ErrorCode::InvalidLink, "tx root mismatch");
    }

    Entry entry;
    entry.block = std::move(block);
    entry.block.summary_sidecar.reset();  // recomputed below
    entry.encoded = entry.block.canonical_encode();
    entry.hash = ops::sha256(entry.encoded);
    if (!satisfies_pow(entry.hash, entry.block.header.difficulty_bits)) {
        throw Error(ErrorCode::InvalidPoW, "block hash above difficulty target");
    }

    const std::uint64_t position = entries_.size() + 1;
    BlockExponent exponent = hash_to_exponent(entry.encoded, position);
    const Summary prev =
        entries_.empty() ? empty_summary(params) : *entries_.back().block.summary_sidecar;
    entry.block.summary_sidecar = summary_append(prev, exponent, params);
    entries_.push_back(std::move(entry));
    exponents_.push_back(std::move(exponent.value));
}

std::optional<ChainStore::TxLocation> ChainStore::find_tx(const Hash256& txid) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& txs = entries_[i].block.transactions;
        for (std::size_t j = 0; j < txs.size(); ++j) {
            if (txs[j].txid == txid) {
                return TxLocation{i + 1, j};
            }
        }
    }
    return std::nullopt;
}

void ChainStore::validate(const PublicParams& params) const {
    Summary running = empty_summary(params);
    Hash256 prev = genesis_prev_hash(params);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const Entry& entry = entries_[i];
        if (entry.block.header.prev_hash != prev) {
            throw Error(ErrorCode::InvalidLink, "broken link at position " + std::to_string(i + 1));
        }
        if (entry.block.header.tx_root != compute_tx_root(entry.block.transactions)) {
            throw Error(ErrorCode::InvalidLink, "tx root mismatch at position " + std::to_string(i + 1));
        }
        Hash256 hash = ops::sha256(entry.encoded);
        if (!satisfies_pow(hash, entry.block.header.difficulty_bits)) {
            throw Error(ErrorCode::InvalidPoW, "insufficient work at position " + std::to_string(i + 1));
        }
        running = summary_append(running, hash_to_exponent(entry.encoded, i + 1), params);
        if (!entry.block.summary_sidecar || *entry.block.summary_sidecar != running) {
            throw Error(ErrorCode::InvalidLink, "sidecar mismatch at position " + std::to_string(i + 1));
        }
        prev = hash;
    }
}

Bytes ChainStore::serialize() const {
    ByteWriter w;
    w.raw(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(kChainMagic), sizeof(kChainMagic)));
    w.u8(kChainVersion);
    for (const Entry& entry : entries_) {
        w.var_bytes(entry.encoded);
        w.var_bytes(encode_summary(*entry.block.summary_sidecar));
    }
    return w.take();
}

void ChainStore::save(const std::string& path) const {
    Bytes bytes = serialize();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::IoFailure, "short write to " + path);
    }
}

ChainStore ChainStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path);
    }
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    ByteReader r(data);
    Bytes magic = r.raw(sizeof(kChainMagic));
    if (std::memcmp(magic.data(), kChainMagic, sizeof(kChainMagic)) != 0) {
        throw Error(ErrorCode::MalformedEncoding, "bad chain magic");
    }
    if (r.u8() != kChainVersion) {
        throw Error(ErrorCode::MalformedEncoding, "unsupported chain version");
    }

    ChainStore store;
    while (!r.empty()) {
        Bytes encoded = r.var_bytes();
        Bytes sidecar = r.var_bytes();
        Entry entry;
        entry.block = Block::canonical_decode(encoded);
        entry.block.summary_sidecar = decode_summary(sidecar);
        entry.encoded = std::move(encoded);
        entry.hash = ops::sha256(entry.encoded);
        store.exponents_.push_back(
            hash_to_exponent(entry.encoded, store.entries_.size() + 1).value);
        store.entries_.push_back(std::move(entry));
    }
    return store;
}

}  // namespace epbc
