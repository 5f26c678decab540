#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "epbc/chain.hpp"
#include "epbc/errors.hpp"
#include "test_support.hpp"

using namespace epbc;
using namespace epbc::test;

namespace {

std::array<std::uint8_t, 32> sender_from(Rng& rng) {
    std::array<std::uint8_t, 32> id{};
    Bytes raw = rng.random_bytes(id.size());
    std::copy(raw.begin(), raw.end(), id.begin());
    return id;
}

Block random_block(Rng& rng, std::size_t tx_count) {
    std::vector<Transaction> txs;
    for (std::size_t i = 0; i < tx_count; ++i) {
        txs.push_back(Transaction::create(rng.random_bytes(rng.uniform_u64(64)),
                                          sender_from(rng), rng.uniform_u64(1000)));
    }
    Hash256 prev{};
    Bytes prev_raw = rng.random_bytes(32);
    std::copy(prev_raw.begin(), prev_raw.end(), prev.begin());
    return mine_block(prev, std::move(txs), 0);
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("txid is the hash of the canonical transaction fields") {
    Rng rng(1);
    Transaction tx = Transaction::create({1, 2, 3}, sender_from(rng), 9);
    Transaction same = Transaction::create({1, 2, 3}, tx.sender_id, 9);
    CHECK(tx.txid == same.txid);
    Transaction bumped = Transaction::create({1, 2, 3}, tx.sender_id, 10);
    CHECK(tx.txid != bumped.txid);
}

TEST_CASE("empty-transaction block encodes to the fixed header plus a zero count") {
    Block block;
    block.header.prev_hash.fill(0xAA);
    block.header.tx_root = compute_tx_root({});
    Bytes encoded = block.canonical_encode();
    // version(4) + prev(32) + root(32) + nonce(8) + difficulty(1) + count(4)
    CHECK(encoded.size() == 81);
    CHECK(encoded[77] == 0);
    CHECK(encoded[78] == 0);
    CHECK(encoded[79] == 0);
    CHECK(encoded[80] == 0);
}

TEST_CASE("canonical encoding round trips random blocks") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        Block block = random_block(rng, rng.uniform_u64(5));
        Bytes encoded = block.canonical_encode();
        Block decoded = Block::canonical_decode(encoded);
        Block expected = block;
        expected.summary_sidecar.reset();
        CHECK(decoded == expected);
        CHECK(decoded.canonical_encode() == encoded);
    }
}

TEST_CASE("the summary sidecar never reaches the encoding") {
    Rng rng(3);
    Block block = random_block(rng, 2);
    Block with_sidecar = block;
    with_sidecar.summary_sidecar = Summary{mpz_class(12345), 7};
    CHECK(block.canonical_encode() == with_sidecar.canonical_encode());
}

TEST_CASE("malformed encodings are rejected") {
    Rng rng(4);
    Block block = random_block(rng, 1);
    Bytes encoded = block.canonical_encode();

    SUBCASE("truncated") {
        Bytes bad(encoded.begin(), encoded.begin() + encoded.size() / 2);
        CHECK_THROWS_AS(Block::canonical_decode(bad), Error);
    }
    SUBCASE("trailing garbage") {
        Bytes bad = encoded;
        bad.push_back(0x00);
        CHECK_THROWS_AS(Block::canonical_decode(bad), Error);
    }
}

TEST_CASE("mining respects difficulty") {
    Rng rng(5);

    SUBCASE("difficulty zero accepts the first nonce") {
        Block block = random_block(rng, 1);
        CHECK(block.header.nonce == 0);
    }

    SUBCASE("difficulty 8 takes about 256 attempts on average") {
        double total_attempts = 0;
        Hash256 prev{};
        for (int i = 0; i < 100; ++i) {
            std::vector<Transaction> txs;
            txs.push_back(Transaction::create(rng.random_bytes(16), sender_from(rng),
                                              static_cast<std::uint64_t>(i)));
            Block block = mine_block(prev, std::move(txs), 8);
            CHECK(satisfies_pow(block_hash(block), 8));
            total_attempts += static_cast<double>(block.header.nonce) + 1;
            prev = block_hash(block);
        }
        double mean = total_attempts / 100.0;
        CHECK(mean > 256.0 / 3.0);
        CHECK(mean < 256.0 * 3.0);
    }

    SUBCASE("desk-scale cap") {
        CHECK_THROWS_AS(mine_block(Hash256{}, {}, 25), Error);
    }
}

TEST_CASE("mined block links to its parent") {
    Rng rng(6);
    Block parent = random_block(rng, 1);
    Block child = mine_block(block_hash(parent), {}, 0);
    CHECK(child.header.prev_hash == block_hash(parent));
}

TEST_CASE("satisfies_pow counts leading zero bits") {
    Hash256 h{};
    h.fill(0);
    CHECK(satisfies_pow(h, 24));
    h[0] = 0x01;
    CHECK(satisfies_pow(h, 7));
    CHECK_FALSE(satisfies_pow(h, 8));
    h[0] = 0x80;
    CHECK_FALSE(satisfies_pow(h, 1));
}

TEST_CASE("append_with_summary maintains the sidecar recurrence") {
    PublicParams params = small_params();
    ChainStore store;
    Rng rng(7);

    SUBCASE("genesis sidecar is g^e1") {
        Block genesis = mine_block(genesis_prev_hash(params), {}, 0);
        store.append_with_summary(genesis, params);
        mpz_class e1 = hash_to_exponent(store.encoded_block(1), 1).value;
        CHECK(store.summary_at(1).value ==
              raw_powm(params.generator_g, e1, params.modulus_N));
        CHECK(store.summary_at(1).height == 1);
    }

    SUBCASE("ten blocks match the one-shot product oracle") {
        ChainStore chain = quick_chain(params, 10);
        std::vector<mpz_class> exponents = chain_exponents(chain);
        mpz_class product = direct_product(exponents, 1, 10);
        CHECK(chain.head_summary().value ==
              raw_powm(params.generator_g, product, params.modulus_N));
    }

    SUBCASE("wrong prev_hash raises InvalidLink and leaves state intact") {
        Hash256 bogus{};
        bogus.fill(0x55);
        Block stray = mine_block(bogus, {}, 0);
        try {
            store.append_with_summary(stray, params);
            FAIL("expected InvalidLink");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidLink);
        }
        CHECK(store.height() == 0);
    }

    SUBCASE("insufficient work raises InvalidPoW") {
        Block weak = mine_block(genesis_prev_hash(params), {}, 0);
        weak.header.difficulty_bits = 20;  // claim harder work than was done
        bool already_strong = satisfies_pow(block_hash(weak), 20);
        if (!already_strong) {
            try {
                store.append_with_summary(weak, params);
                FAIL("expected InvalidPoW");
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::InvalidPoW);
            }
        }
    }
}

TEST_CASE("recomputing sidecars from scratch matches the stored ones") {
    PublicParams params = small_params();
    ChainStore store = quick_chain(params, 20);
    Summary running = empty_summary(params);
    for (std::uint64_t i = 1; i <= 20; ++i) {
        running = summary_append(running, hash_to_exponent(store.encoded_block(i), i), params);
        CHECK(running == store.summary_at(i));
    }
    store.validate(params);  // full pass must also agree
}

TEST_CASE("find_tx agrees with a linear scan oracle") {
    PublicParams params = small_params();
    Rng rng(8);
    ChainStore store;
    Hash256 prev = genesis_prev_hash(params);
    std::vector<std::pair<Hash256, std::uint64_t>> oracle;
    for (std::uint64_t i = 1; i <= 100; ++i) {
        std::vector<Transaction> txs;
        for (int t = 0; t < 2; ++t) {
            Transaction tx =
                Transaction::create(rng.random_bytes(12), sender_from(rng), i * 10 + t);
            oracle.emplace_back(tx.txid, i);
            txs.push_back(std::move(tx));
        }
        Block block = mine_block(prev, std::move(txs), 0);
        store.append_with_summary(block, params);
        prev = store.head_hash();
    }

    for (const auto& [txid, position] : oracle) {
        auto location = store.find_tx(txid);
        REQUIRE(location.has_value());
        CHECK(location->position == position);
        CHECK(store.block_at(position).transactions[location->tx_index].txid == txid);
    }

    Hash256 ghost{};
    ghost.fill(0xEE);
    CHECK_FALSE(store.find_tx(ghost).has_value());
}

TEST_CASE("persistence round trips byte for byte") {
    PublicParams params = small_params();
    ChainStore store = quick_chain(params, 12);
    std::string path = temp_path("epbc_test_chain.bin");

    store.save(path);
    ChainStore loaded = ChainStore::load(path);
    CHECK(loaded.height() == store.height());
    CHECK(loaded.head_summary() == store.head_summary());
    CHECK(loaded.serialize() == store.serialize());
    loaded.validate(params);

    // Re-saving the loaded chain writes identical bytes.
    std::string path2 = temp_path("epbc_test_chain2.bin");
    loaded.save(path2);
    ChainStore again = ChainStore::load(path2);
    CHECK(again.serialize() == store.serialize());

    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("validate detects tampering") {
    PublicParams params = small_params();
    ChainStore store = quick_chain(params, 6);
    std::string path = temp_path("epbc_test_tamper.bin");
    store.save(path);

    // Flip one byte in the middle of the file and expect either a decode
    // failure or a validation failure, never silent acceptance.
    std::ifstream in(path, std::ios::binary);
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    data[data.size() / 2] ^= 0x40;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    out.close();

    bool rejected = false;
    try {
        ChainStore tampered = ChainStore::load(path);
        tampered.validate(params);
    } catch (const Error&) {
        rejected = true;
    }
    CHECK(rejected);
    std::remove(path.c_str());
}
