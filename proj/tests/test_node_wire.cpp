#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

#include "epbc/errors.hpp"
#include "epbc/node.hpp"
#include "epbc/transport.hpp"
#include "test_support.hpp"

using namespace epbc;
using namespace epbc::test;

namespace {

ProverState make_node(const PublicParams& params, std::uint64_t n,
                      std::uint64_t seed = 2002) {
    ProverState state(params, TreeConfig{2, 16});
    ChainStore chain = quick_chain(params, n, seed);
    for (std::uint64_t i = 1; i <= n; ++i) {
        state.ingest_block(chain.block_at(i));
    }
    return state;
}

wire::Message roundtrip(const wire::Message& msg) {
    return wire::decode_frame(wire::encode_frame(msg));
}

}  // namespace

TEST_CASE("wire codec round trips every message type") {
    Rng rng(61);

    wire::Message get_summary = wire::make_get_summary();
    CHECK(roundtrip(get_summary).type == wire::MsgType::GetSummary);

    wire::Message get_proof = wire::make_get_proof(42);
    wire::Message got = roundtrip(get_proof);
    CHECK(got.type == wire::MsgType::GetProof);
    CHECK(got.index == 42);

    Hash256 txid{};
    txid.fill(0xAB);
    wire::Message get_tx = wire::make_get_tx(txid);
    got = roundtrip(get_tx);
    CHECK(got.type == wire::MsgType::GetTx);
    CHECK(got.txid == txid);

    wire::Message summary = wire::make_summary(mpz_class("123456789012345678901234567890"), 77);
    got = roundtrip(summary);
    CHECK(got.type == wire::MsgType::Summary);
    CHECK(got.summary_value == mpz_class("123456789012345678901234567890"));
    CHECK(got.height == 77);

    for (int trial = 0; trial < 50; ++trial) {
        wire::Message proof;
        proof.type = trial % 2 == 0 ? wire::MsgType::Proof : wire::MsgType::TxProof;
        proof.block_bytes = rng.random_bytes(rng.uniform_u64(200));
        proof.index = rng.uniform_u64(1 << 30);
        proof.p1 = rng.uniform_bits(256);
        proof.p2 = rng.uniform_bits(512);
        proof.tx_offset = static_cast<std::uint32_t>(rng.uniform_u64(100));
        got = roundtrip(proof);
        CHECK(got.type == proof.type);
        CHECK(got.block_bytes == proof.block_bytes);
        CHECK(got.index == proof.index);
        CHECK(got.p1 == proof.p1);
        CHECK(got.p2 == proof.p2);
        if (proof.type == wire::MsgType::TxProof) {
            CHECK(got.tx_offset == proof.tx_offset);
        }
    }

    wire::Message error = wire::make_error(wire::kErrTxNotFound, "nope");
    got = roundtrip(error);
    CHECK(got.type == wire::MsgType::Error);
    CHECK(got.error_code == wire::kErrTxNotFound);
    CHECK(got.error_message == "nope");
}

TEST_CASE("frame extraction resynchronizes on the length prefix") {
    wire::Message a = wire::make_get_proof(1);
    wire::Message b = wire::make_get_summary();
    Bytes stream = wire::encode_frame(a);
    Bytes second = wire::encode_frame(b);
    stream.insert(stream.end(), second.begin(), second.end());

    std::size_t consumed = 0;
    auto first = wire::extract_frame(stream, consumed);
    REQUIRE(first.has_value());
    CHECK(wire::decode_frame(*first).type == wire::MsgType::GetProof);

    std::span<const std::uint8_t> rest(stream.data() + consumed, stream.size() - consumed);
    std::size_t consumed2 = 0;
    auto next = wire::extract_frame(rest, consumed2);
    REQUIRE(next.has_value());
    CHECK(wire::decode_frame(*next).type == wire::MsgType::GetSummary);
    CHECK(consumed + consumed2 == stream.size());

    SUBCASE("incomplete frames ask for more bytes") {
        std::span<const std::uint8_t> partial(stream.data(), 3);
        std::size_t c = 0;
        CHECK_FALSE(wire::extract_frame(partial, c).has_value());
    }
}

TEST_CASE("unknown types and malformed payloads are rejected by the codec") {
    Bytes unknown = {0, 0, 0, 1, 0x55};
    CHECK_THROWS_AS(wire::decode_frame(unknown), Error);

    // GET_PROOF with a short payload.
    Bytes short_payload = {0, 0, 0, 3, 0x02, 0xAA, 0xBB};
    CHECK_THROWS_AS(wire::decode_frame(short_payload), Error);

    // Length prefix that lies about the size.
    Bytes liar = wire::encode_frame(wire::make_get_summary());
    liar[3] = 9;
    CHECK_THROWS_AS(wire::decode_frame(liar), Error);
}

TEST_CASE("ingest builds the same state as a batch rebuild") {
    PublicParams params = small_params();
    ChainStore chain = quick_chain(params, 100);

    ProverState one_by_one(params, TreeConfig{2, 16});
    for (std::uint64_t i = 1; i <= 100; ++i) {
        one_by_one.ingest_block(chain.block_at(i));
    }
    ProverState rebuilt = ProverState::from_chain(params, chain, TreeConfig{2, 16});

    CHECK(one_by_one.store().height() == 100);
    CHECK(one_by_one.current_summary() == rebuilt.current_summary());
    CHECK(one_by_one.store().head_hash() == rebuilt.store().head_hash());
    CHECK(one_by_one.tree().root() == rebuilt.tree().root());
    CHECK(one_by_one.current_summary() == chain.head_summary());
}

TEST_CASE("genesis ingest reaches height one") {
    PublicParams params = small_params();
    ProverState state(params, TreeConfig{2, 8});
    Block genesis = mine_block(genesis_prev_hash(params), {}, 0);
    state.ingest_block(genesis);
    CHECK(state.store().height() == 1);
    CHECK(state.current_summary().height == 1);
}

TEST_CASE("out-of-order ingest fails atomically") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 5);
    Summary before = state.current_summary();

    Hash256 bogus{};
    bogus.fill(0x1D);
    Block stray = mine_block(bogus, {}, 0);
    try {
        state.ingest_block(stray);
        FAIL("expected InvalidLink");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidLink);
    }
    CHECK(state.store().height() == 5);
    CHECK(state.current_summary() == before);
    CHECK(state.tree().leaf_count() == 5);
}

TEST_CASE("tree capacity failure leaves the chain untouched") {
    PublicParams params = small_params();
    ProverState state(params, TreeConfig{2, 2});  // capacity 2
    ChainStore chain = quick_chain(params, 3);
    state.ingest_block(chain.block_at(1));
    state.ingest_block(chain.block_at(2));
    try {
        state.ingest_block(chain.block_at(3));
        FAIL("expected CapacityExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CapacityExceeded);
    }
    CHECK(state.store().height() == 2);
    CHECK(state.tree().leaf_count() == 2);
}

TEST_CASE("serve answers GET_SUMMARY with the head summary") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 7);
    wire::Message reply = state.serve(wire::make_get_summary());
    CHECK(reply.type == wire::MsgType::Summary);
    CHECK(reply.summary_value == state.current_summary().value);
    CHECK(reply.height == 7);
}

TEST_CASE("GET_PROOF on a one-block chain returns p2 = g") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 1);
    wire::Message reply = state.serve(wire::make_get_proof(1));
    CHECK(reply.type == wire::MsgType::Proof);
    CHECK(reply.p2 == params.generator_g);
}

TEST_CASE("every served proof verifies against the served summary") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 64);
    wire::Message summary = state.serve(wire::make_get_summary());
    Summary trusted{summary.summary_value, summary.height};

    for (std::uint64_t i = 1; i <= 64; ++i) {
        wire::Message reply = state.serve(wire::make_get_proof(i));
        REQUIRE(reply.type == wire::MsgType::Proof);
        CHECK(reply.index == i);
        MembershipProof proof;
        proof.p1.value = reply.p1;
        proof.p2 = reply.p2;
        CHECK(verify_proof(reply.block_bytes, i, proof, trusted, params));
    }
}

TEST_CASE("bad indices answer ERROR code 2") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 4);
    wire::Message reply = state.serve(wire::make_get_proof(0));
    CHECK(reply.type == wire::MsgType::Error);
    CHECK(reply.error_code == wire::kErrIndexOutOfRange);
    reply = state.serve(wire::make_get_proof(5));
    CHECK(reply.error_code == wire::kErrIndexOutOfRange);
}

TEST_CASE("GET_TX finds transactions and reports misses") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 10);
    const Transaction& tx = state.store().block_at(4).transactions.front();

    wire::Message reply = state.serve(wire::make_get_tx(tx.txid));
    REQUIRE(reply.type == wire::MsgType::TxProof);
    CHECK(reply.index == 4);
    Block decoded = Block::canonical_decode(reply.block_bytes);
    CHECK(decoded.transactions[reply.tx_offset].txid == tx.txid);

    Hash256 ghost{};
    ghost.fill(0x33);
    reply = state.serve(wire::make_get_tx(ghost));
    CHECK(reply.type == wire::MsgType::Error);
    CHECK(reply.error_code == wire::kErrTxNotFound);
}

TEST_CASE("serve_frame turns garbage into ERROR frames and stays usable") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 3);

    // Unknown type byte.
    Bytes unknown = {0, 0, 0, 1, 0x70};
    wire::Message reply = wire::decode_frame(state.serve_frame(unknown));
    CHECK(reply.type == wire::MsgType::Error);
    CHECK(reply.error_code == wire::kErrUnknownType);

    // Known type, malformed payload.
    Bytes short_get_proof = {0, 0, 0, 2, 0x02, 0x01};
    reply = wire::decode_frame(state.serve_frame(short_get_proof));
    CHECK(reply.type == wire::MsgType::Error);
    CHECK(reply.error_code == wire::kErrInternal);

    // A response type sent as a request.
    reply = wire::decode_frame(
        state.serve_frame(wire::encode_frame(wire::make_summary(5, 1))));
    CHECK(reply.type == wire::MsgType::Error);
    CHECK(reply.error_code == wire::kErrUnknownType);

    // The same connection still answers real requests.
    reply = wire::decode_frame(state.serve_frame(wire::encode_frame(wire::make_get_summary())));
    CHECK(reply.type == wire::MsgType::Summary);
}

TEST_CASE("serve is read-only") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 6);
    Summary before = state.current_summary();
    Bytes tree_before = state.tree().serialize();

    Rng rng(62);
    for (int i = 0; i < 200; ++i) {
        switch (rng.uniform_u64(3)) {
            case 0: state.serve(wire::make_get_summary()); break;
            case 1: state.serve(wire::make_get_proof(rng.uniform_u64(10))); break;
            default: {
                Hash256 txid{};
                txid.fill(static_cast<std::uint8_t>(i));
                state.serve(wire::make_get_tx(txid));
            }
        }
    }
    CHECK(state.current_summary() == before);
    CHECK(state.tree().serialize() == tree_before);
    CHECK(state.store().height() == 6);
}

TEST_CASE("honest wrap is the identity on frames") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 8);
    auto handler = byzantine_wrap(state, Strategy::Honest);

    for (std::uint64_t i = 1; i <= 8; ++i) {
        Bytes frame = wire::encode_frame(wire::make_get_proof(i));
        CHECK(handler->handle_frame(frame) == state.serve_frame(frame));
    }
}

TEST_CASE("stale-summary wrap serves a consistent older view") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 20);
    auto handler = byzantine_wrap(state, Strategy::StaleSummary, 1, 5);

    wire::Message reply =
        wire::decode_frame(handler->handle_frame(wire::encode_frame(wire::make_get_summary())));
    REQUIRE(reply.type == wire::MsgType::Summary);
    CHECK(reply.height == 15);
    CHECK(reply.summary_value == state.store().summary_at(15).value);

    // Its proofs verify against its own (stale) summary.
    Summary stale{reply.summary_value, reply.height};
    wire::Message proof_reply =
        wire::decode_frame(handler->handle_frame(wire::encode_frame(wire::make_get_proof(3))));
    REQUIRE(proof_reply.type == wire::MsgType::Proof);
    MembershipProof proof;
    proof.p1.value = proof_reply.p1;
    proof.p2 = proof_reply.p2;
    CHECK(verify_proof(proof_reply.block_bytes, 3, proof, stale, params));
    // But not against the current one.
    CHECK_FALSE(verify_proof(proof_reply.block_bytes, 3, proof, state.current_summary(), params));
}

TEST_CASE("forged-block responses never verify") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 16);
    Summary honest = state.current_summary();
    auto handler = byzantine_wrap(state, Strategy::ForgedBlock, 7);

    int rejected = 0;
    Rng rng(63);
    for (int trial = 0; trial < 1000; ++trial) {
        std::uint64_t index = 1 + rng.uniform_u64(16);
        wire::Message reply = wire::decode_frame(
            handler->handle_frame(wire::encode_frame(wire::make_get_proof(index))));
        REQUIRE(reply.type == wire::MsgType::Proof);
        MembershipProof proof;
        proof.p1.value = reply.p1;
        proof.p2 = reply.p2;
        if (!verify_proof(reply.block_bytes, index, proof, honest, params)) ++rejected;
    }
    CHECK(rejected == 1000);
}

TEST_CASE("random-proof and wrong-position responses never verify") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 16);
    Summary honest = state.current_summary();

    for (Strategy strategy : {Strategy::RandomProof, Strategy::WrongPosition}) {
        auto handler = byzantine_wrap(state, strategy, 11);
        Rng rng(64);
        int rejected = 0;
        for (int trial = 0; trial < 500; ++trial) {
            std::uint64_t index = 1 + rng.uniform_u64(16);
            wire::Message reply = wire::decode_frame(
                handler->handle_frame(wire::encode_frame(wire::make_get_proof(index))));
            REQUIRE(reply.type == wire::MsgType::Proof);
            MembershipProof proof;
            proof.p1.value = reply.p1;
            proof.p2 = reply.p2;
            if (!verify_proof(reply.block_bytes, index, proof, honest, params)) ++rejected;
        }
        CHECK(rejected == 500);
    }
}

TEST_CASE("strategy names round trip") {
    for (Strategy s : {Strategy::Honest, Strategy::StaleSummary, Strategy::ForgedBlock,
                       Strategy::RandomProof, Strategy::WrongPosition}) {
        CHECK(strategy_from_name(strategy_name(s)) == s);
    }
    CHECK_THROWS_AS(strategy_from_name("sybil"), Error);
}

TEST_CASE("concurrent request handlers see a consistent snapshot") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 32);
    Summary summary = state.current_summary();

    std::vector<std::thread> workers;
    std::atomic<int> failures{0};
    for (int w = 0; w < 8; ++w) {
        workers.emplace_back([&, w] {
            Rng rng(900 + w);
            for (int r = 0; r < 50; ++r) {
                std::uint64_t i = 1 + rng.uniform_u64(32);
                wire::Message reply = state.serve(wire::make_get_proof(i));
                MembershipProof proof;
                proof.p1.value = reply.p1;
                proof.p2 = reply.p2;
                if (reply.type != wire::MsgType::Proof ||
                    !verify_proof(reply.block_bytes, i, proof, summary, params)) {
                    ++failures;
                }
            }
        });
    }
    for (std::thread& t : workers) t.join();
    CHECK(failures.load() == 0);
}

TEST_CASE("TCP smoke test: summary and proof over a real socket") {
    PublicParams params = small_params();
    ProverState state = make_node(params, 5);
    auto handler = byzantine_wrap(state, Strategy::Honest);
    TcpServer server(*handler, "127.0.0.1", 0);  // ephemeral port

    TcpChannel channel("127.0.0.1", server.port());
    wire::Message summary = channel.request(wire::make_get_summary());
    REQUIRE(summary.type == wire::MsgType::Summary);
    CHECK(summary.height == 5);

    wire::Message proof_reply = channel.request(wire::make_get_proof(2));
    REQUIRE(proof_reply.type == wire::MsgType::Proof);
    MembershipProof proof;
    proof.p1.value = proof_reply.p1;
    proof.p2 = proof_reply.p2;
    CHECK(verify_proof(proof_reply.block_bytes, 2,
                       proof, Summary{summary.summary_value, summary.height}, params));
    server.stop();

    SUBCASE("unreachable port throws PeerUnreachable") {
        TcpChannel dead("127.0.0.1", 1);
        try {
            dead.request(wire::make_get_summary());
            FAIL("expected PeerUnreachable");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::PeerUnreachable);
        }
    }
}
