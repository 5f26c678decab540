// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Full-node prover: owns the chain, the product tree and the running
// summary, and answers light-client requests. Request handling is read-only;
// block ingestion takes exclusive access and either commits the block to
// both the chain and the tree or leaves the state untouched.

#ifndef EPBC_NODE_HPP
#define EPBC_NODE_HPP

#include <cstdint>
#include <memory>
#include <string>

#include "epbc/chain.hpp"
#include "epbc/prooftree.hpp"
#include "epbc/wire.hpp"

namespace epbc {

class ProverState {
public:
    ProverState(PublicParams params, TreeConfig tree_config = {});

    // Validates, appends to the chain, computes the sidecar and extends the
    // tree. Failure leaves the previous state intact.
    void ingest_block(const Block& block);

    // Pure request dispatch; protocol failures become ERROR responses.
    wire::Message serve(const wire::Message& request) const;

    // Frame-level entry point: malformed input becomes an ERROR frame, never
    // an exception, so one bad request cannot take a connection down.
    Bytes serve_frame(std::span<const std::uint8_t> frame) const;

    const ChainStore& store() const { return store_; }
    const ProductTree& tree() const { return tree_; }
    const PublicParams& params() const { return params_; }
    Summary current_summary() const;

    static ProverState from_chain(PublicParams params, const ChainStore& chain,
                                  TreeConfig tree_config = {});

private:
    PublicParams params_;
    ChainStore store_;
    ProductTree tree_;
};

// A byte-frame request handler; the unit the transports carry.
class RequestHandler {
public:
    virtual ~RequestHandler() = default;
    virtual Bytes handle_frame(std::span<const std::uint8_t> frame) = 0;
};

enum class Strategy {
    Honest,
    StaleSummary,   // serves a consistent view truncated `lag` blocks back
    ForgedBlock,    // tampers block bytes, recomputes p1, keeps the stale p2
    RandomProof,    // replaces p2 with a random element of Z_N*
    WrongPosition,  // serves a neighboring block's proof relabeled
};

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// Wraps a prover in a deterministic adversarial (or honest) serving
// behavior. `seed` drives any randomness in the strategy; `stale_lag` only
// applies to StaleSummary.
std::unique_ptr<RequestHandler> byzantine_wrap(const ProverState& state, Strategy strategy,
                                               std::uint64_t seed = 0,
                                               std::uint64_t stale_lag = 5);

}  // namespace epbc

#endif
