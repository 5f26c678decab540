// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/prooftree.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "epbc/encoding.hpp"
#include "epbc/errors.hpp"

namespace epbc {

namespace {

constexpr char kTreeMagic[7] = {'E', 'P', 'B', 'C', 'T', 'R', 'E'};
constexpr std::uint8_t kTreeVersion = 1;

std::uint64_t pow_saturating(std::uint64_t base, std::uint32_t exp) {
    std::uint64_t result = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        if (result > std::numeric_limits<std::uint64_t>::max() / base) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        result *= base;
    }
    return result;
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

std::uint64_t TreeConfig::capacity() const {
    return pow_saturating(branching_m, height_h - 1);
}

ProductTree::ProductTree(TreeConfig config) : config_(config) {
    if (config_.branching_m < 2) {
        throw Error(ErrorCode::Internal, "branching factor must be >= 2");
    }
    if (config_.height_h < 2) {
        throw Error(ErrorCode::Internal, "tree height must be >= 2");
    }
}

void ProductTree::append(const BlockExponent& exponent) {
    if (leaf_count_ >= config_.capacity()) {
        throw Error(ErrorCode::CapacityExceeded, "tree is full");
    }
    const std::uint64_t pos = leaf_count_;  // 0-based leaf index
    const std::uint64_t m = config_.branching_m;

    if (levels_.empty()) levels_.emplace_back();
    levels_[0].push_back(exponent.value);
    ++leaf_count_;

    // Multiply the new exponent into every ancestor. A level is materialized
    // only once the level below holds more than one node; the first node of a
    // brand-new top level is seeded with the product of the level below.
    std::uint64_t stride = m;  // leaves covered per node at this level
    for (std::size_t level = 1; levels_[level - 1].size() > 1; ++level) {
        const std::uint64_t j = pos / stride;
        if (level == levels_.size()) {
            mpz_class top = levels_[level - 1][0];
            for (std::size_t k = 1; k < levels_[level - 1].size(); ++k) {
                ops::mul_into(top, levels_[level - 1][k]);
            }
            levels_.emplace_back();
            levels_[level].push_back(std::move(top));
        } else if (j < levels_[level].size()) {
            ops::mul_into(levels_[level][j], exponent.value);
        } else {
            levels_[level].push_back(exponent.value);
        }
        stride *= m;
    }
}

const mpz_class& ProductTree::root() const {
    if (leaf_count_ == 0) return one_;
    return levels_.back()[0];
}

const mpz_class& ProductTree::leaf(std::uint64_t position) const {
    if (position == 0 || position > leaf_count_) {
        throw Error(ErrorCode::IndexOutOfRange, "leaf position outside tree");
    }
    return levels_[0][position - 1];
}

const std::vector<mpz_class>& ProductTree::level(std::size_t level_index) const {
    if (level_index >= levels_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "level not materialized");
    }
    return levels_[level_index];
}

mpz_class ProductTree::suffix_product(std::uint64_t from_index) const {
    if (from_index == 0 || from_index > leaf_count_ + 1) {
        throw Error(ErrorCode::IndexOutOfRange, "suffix start outside tree");
    }
    if (from_index == leaf_count_ + 1) return 1;
    if (from_index == 1) return root();

    const std::uint64_t m = config_.branching_m;
    mpz_class result = 1;
    std::uint64_t a = from_index - 1;  // 0-based node index at current level
    std::uint64_t nodes = leaf_count_; // node count at current level
    for (std::size_t level = 0; a > 0; ++level) {
        // Take whole nodes from a up to the parent boundary (or the end);
        // partial right-edge nodes already equal the product of the leaves
        // that exist under them.
        std::uint64_t boundary = ceil_div(a, m) * m;
        if (boundary > nodes) boundary = nodes;
        for (std::uint64_t j = a; j < boundary; ++j) {
            ops::mul_into(result, levels_[level][j]);
        }
        if (boundary == nodes) break;
        a = boundary / m;
        nodes = ceil_div(nodes, m);
    }
    return result;
}

std::uint64_t ProductTree::stored_node_bytes() const {
    std::uint64_t total = 0;
    for (const auto& level : levels_) {
        for (const mpz_class& node : level) {
            total += (mpz_sizeinbase(node.get_mpz_t(), 2) + 7) / 8;
        }
    }
    return total;
}

Bytes ProductTree::serialize() const {
    ByteWriter w;
    w.raw(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(kTreeMagic), sizeof(kTreeMagic)));
    w.u8(kTreeVersion);
    w.u32(config_.branching_m);
    w.u32(config_.height_h);
    w.u64(leaf_count_);
    for (std::size_t level = 0; level < levels_.size(); ++level) {
        for (std::size_t j = 0; j < levels_[level].size(); ++j) {
            w.u8(static_cast<std::uint8_t>(level));
            w.u64(j);
            w.bigint(levels_[level][j]);
        }
    }
    return w.take();
}

ProductTree ProductTree::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Bytes magic = r.raw(sizeof(kTreeMagic));
    if (std::memcmp(magic.data(), kTreeMagic, sizeof(kTreeMagic)) != 0) {
        throw Error(ErrorCode::MalformedEncoding, "bad tree magic");
    }
    if (r.u8() != kTreeVersion) {
        throw Error(ErrorCode::MalformedEncoding, "unsupported tree version");
    }
    TreeConfig config;
    config.branching_m = r.u32();
    config.height_h = r.u32();
    ProductTree tree(config);
    std::uint64_t leaf_count = r.u64();
    while (!r.empty()) {
        std::uint8_t level = r.u8();
        std::uint64_t index = r.u64();
        mpz_class value = r.bigint();
        if (level >= tree.levels_.size()) {
            if (level != tree.levels_.size()) {
                throw Error(ErrorCode::MalformedEncoding, "levels out of order");
            }
            tree.levels_.emplace_back();
        }
        if (index != tree.levels_[level].size()) {
            throw Error(ErrorCode::MalformedEncoding, "node indices out of order");
        }
        tree.levels_[level].push_back(std::move(value));
    }
    tree.leaf_count_ = leaf_count;
    if (tree.levels_.empty() ? leaf_count != 0 : tree.levels_[0].size() != leaf_count) {
        throw Error(ErrorCode::MalformedEncoding, "leaf count mismatch");
    }
    return tree;
}

void ProductTree::save(const std::string& path) const {
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

ProductTree ProductTree::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path);
    }
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(data);
}

MembershipProof prove_fast(const ChainStore& store, const ProductTree& tree,
                           std::uint64_t index, const PublicParams& params) {
    const std::uint64_t n = store.height();
    if (index == 0 || index > n) {
        throw Error(ErrorCode::IndexOutOfRange, "proof index outside chain");
    }
    if (tree.leaf_count() != n || tree.leaf(index) != store.exponent_at(index)) {
        throw Error(ErrorCode::TreeOutOfSync, "tree does not match chain");
    }

    MembershipProof proof;
    proof.p1.value = tree.leaf(index);

    // S_{index-1} ^ (product of exponents after index): algebraically equal
    // to g^(product of all exponents except index), with one exponentiation.
    const mpz_class& base =
        index == 1 ? params.generator_g : store.summary_at(index - 1).value;
    mpz_class suffix = tree.suffix_product(index + 1);
    proof.p2 = ops::mod_exp(base, suffix, params.modulus_N);
    return proof;
}

std::uint32_t optimal_branching(std::uint64_t n) {
    if (n < 2) {
        throw Error(ErrorCode::IndexOutOfRange, "need at least two leaves");
    }
    const long double log_n = std::log(static_cast<long double>(n));
    std::uint32_t best_m = 2;
    long double best_cost = std::numeric_limits<long double>::max();
    for (std::uint32_t m = 2; m <= 64; ++m) {
        long double cost = log_n / std::log(static_cast<long double>(m)) + m;
        if (cost < best_cost) {
            best_cost = cost;
            best_m = m;
        }
    }
    return best_m;
}

}  // namespace epbc
