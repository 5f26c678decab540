// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/node.hpp"

#include "epbc/encoding.hpp"
#include "epbc/errors.hpp"

namespace epbc {

ProverState::ProverState(PublicParams params, TreeConfig tree_config)
    : params_(std::move(params)), tree_(tree_config) {
    params_.check_invariants();
}

ProverState ProverState::from_chain(PublicParams params, const ChainStore& chain,
                                    TreeConfig tree_config) {
    ProverState state(std::move(params), tree_config);
    for (std::uint64_t i = 1; i <= chain.height(); ++i) {
        state.ingest_block(chain.block_at(i));
    }
    return state;
}

void ProverState::ingest_block(const Block& block) {
    // Tree capacity must be checked before the chain mutates.
    if (tree_.leaf_count() >= tree_.config().capacity()) {
        throw Error(ErrorCode::CapacityExceeded, "proof tree is full");
    }
    store_.append_with_summary(block, params_);
    tree_.append(BlockExponent{store_.exponent_at(store_.height())});
}

Summary ProverState::current_summary() const {
    return store_.height() == 0 ? empty_summary(params_) : store_.head_summary();
}

wire::Message ProverState::serve(const wire::Message& request) const {
    try {
        switch (request.type) {
            case wire::MsgType::GetSummary: {
                Summary s = current_summary();
                return wire::make_summary(s.value, s.height);
            }
            case wire::MsgType::GetProof: {
                if (request.index == 0 || request.index > store_.height()) {
                    return wire::make_error(wire::kErrIndexOutOfRange,
                                            "index outside chain");
                }
                MembershipProof proof = prove_fast(store_, tree_, request.index, params_);
                wire::Message reply;
                reply.type = wire::MsgType::Proof;
                reply.block_bytes = store_.encoded_block(request.index);
                reply.index = request.index;
                reply.p1 = proof.p1.value;
                reply.p2 = proof.p2;
                return reply;
            }
            case wire::MsgType::GetTx: {
                auto location = store_.find_tx(request.txid);
                if (!location) {
                    return wire::make_error(wire::kErrTxNotFound, "unknown txid");
                }
                MembershipProof proof = prove_fast(store_, tree_, location->position, params_);
                wire::Message reply;
                reply.type = wire::MsgType::TxProof;
                reply.block_bytes = store_.encoded_block(location->position);
                reply.index = location->position;
                reply.p1 = proof.p1.value;
                reply.p2 = proof.p2;
                reply.tx_offset = static_cast<std::uint32_t>(location->tx_index);
                return reply;
            }
            default:
                return wire::make_error(wire::kErrUnknownType, "not a request type");
        }
    } catch (const std::exception& e) {
        return wire::make_error(wire::kErrInternal, e.what());
    }
}

Bytes ProverState::serve_frame(std::span<const std::uint8_t> frame) const {
    wire::Message request;
    try {
        request = wire::decode_frame(frame);
    } catch (const Error&) {
        // Distinguish an unknown type byte from a known type with a bad
        // payload; both answer with ERROR so the connection stays usable.
        std::uint16_t code = wire::kErrInternal;
        if (frame.size() >= 5) {
            std::uint8_t type = frame[4];
            switch (static_cast<wire::MsgType>(type)) {
                case wire::MsgType::GetSummary:
                case wire::MsgType::GetProof:
                case wire::MsgType::GetTx:
                case wire::MsgType::Summary:
                case wire::MsgType::Proof:
                case wire::MsgType::TxProof:
                case wire::MsgType::Error:
                    code = wire::kErrInternal;
                    break;
                default:
                    code = wire::kErrUnknownType;
            }
        }
        return wire::encode_frame(wire::make_error(code, "malformed request"));
    }
    return wire::encode_frame(serve(request));
}

namespace {

class WrappedHandler : public RequestHandler {
public:
    WrappedHandler(const ProverState& state, Strategy strategy, std::uint64_t seed,
                   std::uint64_t stale_lag)
        : state_(state), strategy_(strategy), rng_(seed) {
        if (strategy_ == Strategy::StaleSummary) {
            std::uint64_t height = state.store().height();
            std::uint64_t lag = std::min(stale_lag, height > 0 ? height - 1 : 0);
            stale_state_ = std::make_unique<ProverState>(state.params(), state.tree().config());
            for (std::uint64_t i = 1; i + lag <= height; ++i) {
                stale_state_->ingest_block(state.store().block_at(i));
            }
        }
    }

    Bytes handle_frame(std::span<const std::uint8_t> frame) override {
        const ProverState& view =
            strategy_ == Strategy::StaleSummary ? *stale_state_ : state_;

        if (strategy_ == Strategy::Honest || strategy_ == Strategy::StaleSummary) {
            return view.serve_frame(frame);
        }

        wire::Message request;
        try {
            request = wire::decode_frame(frame);
        } catch (const Error&) {
            return view.serve_frame(frame);
        }
        wire::Message reply = mangle(view, request);
        return wire::encode_frame(reply);
    }

private:
    wire::Message mangle(const ProverState& view, const wire::Message& request) {
        switch (strategy_) {
            case Strategy::ForgedBlock:
                return forged_block(view, request);
            case Strategy::RandomProof:
                return random_proof(view, request);
            case Strategy::WrongPosition:
                return wrong_position(view, request);
            default:
                return view.serve(request);
        }
    }

    // Tampers a byte of the served block and recomputes p1 so the bytes and
    // p1 agree, but leaves p2 untouched; verification then fails on the
    // summary equation.
    wire::Message forged_block(const ProverState& view, const wire::Message& request) {
        wire::Message reply;
        if (request.type == wire::MsgType::GetTx &&
            !view.store().find_tx(request.txid)) {
            // Claim an arbitrary block "contains" the unknown transaction.
            if (view.store().height() == 0) return view.serve(request);
            wire::Message fake = view.serve(wire::make_get_proof(view.store().height()));
            fake.type = wire::MsgType::TxProof;
            fake.tx_offset = 0;
            reply = std::move(fake);
        } else {
            reply = view.serve(request);
        }
        if (reply.type != wire::MsgType::Proof && reply.type != wire::MsgType::TxProof) {
            return reply;
        }
        if (!reply.block_bytes.empty()) {
            std::size_t at = rng_.uniform_u64(reply.block_bytes.size());
            reply.block_bytes[at] ^= 0xFF;
        }
        reply.p1 = hash_to_exponent(reply.block_bytes, reply.index).value;
        return reply;
    }

    wire::Message random_proof(const ProverState& view, const wire::Message& request) {
        wire::Message reply = view.serve(request);
        if (reply.type == wire::MsgType::Proof || reply.type == wire::MsgType::TxProof) {
            const mpz_class& N = view.params().modulus_N;
            reply.p2 = rng_.uniform_below(N - 2) + 2;
        }
        return reply;
    }

    // Serves the neighboring block's bytes and proof under the requested
    // index, so the position in the hash preimage disagrees.
    wire::Message wrong_position(const ProverState& view, const wire::Message& request) {
        if (request.type == wire::MsgType::GetProof) {
            std::uint64_t n = view.store().height();
            if (request.index == 0 || request.index > n || n < 2) {
                return view.serve(request);
            }
            std::uint64_t neighbor = request.index > 1 ? request.index - 1 : request.index + 1;
            wire::Message reply = view.serve(wire::make_get_proof(neighbor));
            if (reply.type == wire::MsgType::Proof) {
                reply.index = request.index;
            }
            return reply;
        }
        if (request.type == wire::MsgType::GetTx) {
            wire::Message reply = view.serve(request);
            if (reply.type == wire::MsgType::TxProof) {
                reply.index = reply.index < view.store().height() ? reply.index + 1
                                                                  : reply.index - 1;
            }
            return reply;
        }
        return view.serve(request);
    }

    const ProverState& state_;
    Strategy strategy_;
    Rng rng_;
    std::unique_ptr<ProverState> stale_state_;
};

}  // namespace

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Honest: return "honest";
        case Strategy::StaleSummary: return "stale-summary";
        case Strategy::ForgedBlock: return "forged-block";
        case Strategy::RandomProof: return "random-proof";
        case Strategy::WrongPosition: return "wrong-position";
    }
    return "unknown";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "honest") return Strategy::Honest;
    if (name == "stale-summary") return Strategy::StaleSummary;
    if (name == "forged-block") return Strategy::ForgedBlock;
    if (name == "random-proof") return Strategy::RandomProof;
    if (name == "wrong-position") return Strategy::WrongPosition;
    throw Error(ErrorCode::MalformedEncoding, "unknown strategy " + name);
}

std::unique_ptr<RequestHandler> byzantine_wrap(const ProverState& state, Strategy strategy,
                                               std::uint64_t seed, std::uint64_t stale_lag) {
    return std::make_unique<WrappedHandler>(state, strategy, seed, stale_lag);
}

}  // namespace epbc
