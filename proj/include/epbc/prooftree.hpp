// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Sparse m-ary product tree over block exponents. Leaves hold the positioned
// block hashes; every internal node holds the product of its children, so a
// suffix product over blocks [i+1, n] costs at most (m-1) node reads per
// level instead of a walk over the whole chain. Proof generation drops from
// O(n) to one modular exponentiation plus O(m log n) multiplications.

#ifndef EPBC_PROOFTREE_HPP
#define EPBC_PROOFTREE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "epbc/accumulator.hpp"
#include "epbc/chain.hpp"

namespace epbc {

struct TreeConfig {
    std::uint32_t branching_m = 2;
    std::uint32_t height_h = 32;

    // Maximum leaf count, m^(h-1), saturating at 2^64-1.
    std::uint64_t capacity() const;
};

class ProductTree {
public:
    explicit ProductTree(TreeConfig config = {});

    const TreeConfig& config() const { return config_; }
    std::uint64_t leaf_count() const { return leaf_count_; }

    // Appends the next leaf and multiplies it into every ancestor. Nodes
    // that would only cover empty leaves are never materialized.
    void append(const BlockExponent& exponent);

    // Product of all leaves (1 when empty).
    const mpz_class& root() const;

    // Leaf value at 1-based position.
    const mpz_class& leaf(std::uint64_t position) const;

    // Product of the exponents at positions [from_index, n], using stored
    // node products; 1 when from_index == n + 1.
    mpz_class suffix_product(std::uint64_t from_index) const;

    // Number of materialized levels (level 0 = leaves).
    std::size_t level_count() const { return levels_.size(); }
    // Node values at one level, index-ordered; covers m^level leaves each.
    const std::vector<mpz_class>& level(std::size_t level_index) const;

    // Total bytes of all stored node magnitudes (storage accounting).
    std::uint64_t stored_node_bytes() const;

    // Snapshot format: magic, version, m, h, n, then records sorted by
    // (level, index): level u8, index u64, length-prefixed value.
    Bytes serialize() const;
    static ProductTree deserialize(std::span<const std::uint8_t> data);
    void save(const std::string& path) const;
    static ProductTree load(const std::string& path);

private:
    TreeConfig config_;
    std::uint64_t leaf_count_ = 0;
    // levels_[0] is the leaf level; level L is materialized only while level
    // L-1 holds more than one node, so node (L, j) covers leaves
    // [j*m^L, (j+1)*m^L) and levels_[L].size() == ceil(n / m^L).
    std::vector<std::vector<mpz_class>> levels_;
    mpz_class one_ = 1;
};

// Membership proof for block `index` using the stored sidecar of the
// previous block as the base: p2 = S_{index-1} ^ suffix_product(index+1),
// bit-identical to prove_naive but with a single modular exponentiation.
MembershipProof prove_fast(const ChainStore& store, const ProductTree& tree,
                           std::uint64_t index, const PublicParams& params);

// Integer m >= 2 minimizing log_m(n) + m, the per-proof work of an m-ary
// tree; close to ln(n). Exact minimization over m in [2, 64].
std::uint32_t optimal_branching(std::uint64_t n);

}  // namespace epbc

#endif
