// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "epbc/errors.hpp"

namespace epbc {

namespace {

using nlohmann::json;

std::array<std::uint8_t, 32> seeded_sender(Rng& rng) {
    std::array<std::uint8_t, 32> id{};
    Bytes raw = rng.random_bytes(id.size());
    std::copy(raw.begin(), raw.end(), id.begin());
    return id;
}

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

ChainStore build_test_chain(const PublicParams& params, std::uint64_t length,
                            std::uint8_t difficulty_bits, Rng& rng,
                            std::uint64_t probe_position, Hash256* probe_txid) {
    ChainStore store;
    Hash256 prev = genesis_prev_hash(params);
    for (std::uint64_t i = 1; i <= length; ++i) {
        std::vector<Transaction> txs;
        txs.push_back(Transaction::create(rng.random_bytes(24), seeded_sender(rng), i));
        if (i == probe_position) {
            Transaction probe =
                Transaction::create(rng.random_bytes(16), seeded_sender(rng), 7000 + i);
            if (probe_txid != nullptr) *probe_txid = probe.txid;
            txs.push_back(std::move(probe));
        }
        Block block = mine_block(prev, std::move(txs), difficulty_bits);
        store.append_with_summary(block, params);
        prev = store.head_hash();
    }
    return store;
}

Scenario Scenario::from_json(const std::string& text) {
    json j = json::parse(text);
    Scenario s;
    s.seed = j.value("seed", s.seed);
    s.chain_length = j.value("chain_length", s.chain_length);
    s.difficulty_bits = static_cast<std::uint8_t>(j.value("difficulty_bits", 4));
    if (j.contains("peers")) {
        s.peer_strategies.clear();
        for (const auto& name : j.at("peers")) {
            s.peer_strategies.push_back(strategy_from_name(name.get<std::string>()));
        }
    }
    s.sample_l = j.value("sample_l", s.sample_l);
    s.spot_checks_k = j.value("spot_checks_k", s.spot_checks_k);
    s.confirmation_depth = j.value("confirmation_depth", s.confirmation_depth);
    s.params_bits = j.value("params_bits", s.params_bits);
    s.stale_lag = j.value("stale_lag", s.stale_lag);
    return s;
}

Scenario Scenario::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

std::string Scenario::to_json() const {
    json j;
    j["seed"] = seed;
    j["chain_length"] = chain_length;
    j["difficulty_bits"] = difficulty_bits;
    json peers = json::array();
    for (Strategy s : peer_strategies) peers.push_back(strategy_name(s));
    j["peers"] = peers;
    j["sample_l"] = sample_l;
    j["spot_checks_k"] = spot_checks_k;
    j["confirmation_depth"] = confirmation_depth;
    j["params_bits"] = params_bits;
    j["stale_lag"] = stale_lag;
    return j.dump(2);
}

std::string ScenarioOutcome::to_record() const {
    std::ostringstream out;
    out << "honest=" << honest_summary.value.get_str(16) << ":" << honest_summary.height
        << "\n";
    if (adopted) {
        out << "adopted=" << adopted_summary.value.get_str(16) << ":"
            << adopted_summary.height << "\n";
    } else {
        out << "adopted=NOMAJORITY\n";
    }
    out << "match=" << (adopted_matches_honest ? "true" : "false") << "\n";
    for (std::size_t i = 0; i < peer_verdicts.size(); ++i) {
        const PeerVerdict& v = peer_verdicts[i];
        out << "peer=" << v.peer_index << " strategy="
            << strategy_name(sampled_strategies[i])
            << " reachable=" << (v.reachable ? "yes" : "no")
            << " checks=" << (v.checks_passed ? "pass" : "fail")
            << " height=" << v.claimed.height << "\n";
    }
    out << "probe_tx=" << probe_tx_verdict << "\n";
    out << "ghost_tx=" << ghost_tx_verdict << "\n";
    return out.str();
}

ScenarioOutcome run_scenario(const Scenario& scenario) {
    DevSetupResult setup = dev_setup(scenario.params_bits, scenario.seed ^ 0x5eedULL);
    return run_scenario(scenario, setup.params);
}

ScenarioOutcome run_scenario(const Scenario& scenario, const PublicParams& params) {
    Rng chain_rng(scenario.seed * 3 + 1);
    const std::uint64_t n = scenario.chain_length;
    const std::uint64_t probe_position =
        n > scenario.confirmation_depth ? n - scenario.confirmation_depth : (n > 0 ? 1 : 0);

    Hash256 probe_txid{};
    ChainStore chain = build_test_chain(params, n, scenario.difficulty_bits, chain_rng,
                                        probe_position, &probe_txid);
    ProverState honest_node = ProverState::from_chain(params, chain);

    std::vector<std::unique_ptr<RequestHandler>> handlers;
    std::vector<std::unique_ptr<InProcessChannel>> channels;
    std::vector<PeerChannel*> peer_ptrs;
    for (std::size_t i = 0; i < scenario.peer_strategies.size(); ++i) {
        handlers.push_back(byzantine_wrap(honest_node, scenario.peer_strategies[i],
                                          scenario.seed + 1000 + i, scenario.stale_lag));
        channels.push_back(std::make_unique<InProcessChannel>(*handlers.back()));
        peer_ptrs.push_back(channels.back().get());
    }

    ScenarioOutcome outcome;
    outcome.honest_summary = honest_node.current_summary();

    Rng client_rng(scenario.seed * 7 + 3);
    IdentifyOptions options{scenario.sample_l, scenario.spot_checks_k};
    ClientState client(params, scenario.confirmation_depth);
    try {
        IdentifyOutcome identify = identify_chain(peer_ptrs, params, options, client_rng);
        outcome.adopted = true;
        outcome.adopted_summary = identify.adopted;
        outcome.peer_verdicts = identify.verdicts;
        client.adopt_summary(identify.adopted);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoMajority) throw;
        outcome.adopted = false;
        outcome.probe_tx_verdict = "skipped";
        outcome.ghost_tx_verdict = "skipped";
    }
    for (const PeerVerdict& v : outcome.peer_verdicts) {
        outcome.sampled_strategies.push_back(scenario.peer_strategies[v.peer_index]);
    }
    outcome.adopted_matches_honest =
        outcome.adopted && outcome.adopted_summary == outcome.honest_summary;

    if (outcome.adopted && n > 0) {
        // Query through the first sampled peer that passed its checks, which
        // is how a real client would pick its prover.
        PeerChannel* prover = nullptr;
        for (const PeerVerdict& v : outcome.peer_verdicts) {
            if (v.reachable && v.checks_passed) {
                prover = peer_ptrs[v.peer_index];
                break;
            }
        }
        if (prover == nullptr) prover = peer_ptrs.front();

        try {
            outcome.probe_tx_verdict =
                tx_verdict_name(verify_transaction(client, *prover, probe_txid));
        } catch (const Error&) {
            outcome.probe_tx_verdict = "unreachable";
        }
        Hash256 ghost = ops::sha256(Bytes{0x67, 0x68, 0x6f, 0x73, 0x74});
        try {
            outcome.ghost_tx_verdict =
                tx_verdict_name(verify_transaction(client, *prover, ghost));
        } catch (const Error&) {
            outcome.ghost_tx_verdict = "unreachable";
        }
    }
    return outcome;
}

namespace {

struct Checkpoint {
    std::uint64_t n;
    ChainStore store;
    std::vector<ProductTree> trees;  // one per m value
};

}  // namespace

BenchReport bench_suite(const PublicParams& params,
                        const std::vector<std::uint64_t>& n_values,
                        const std::vector<std::uint32_t>& m_values,
                        unsigned repetitions) {
    if (repetitions < 1) repetitions = 1;
    BenchReport report;

    std::uint64_t max_n = 0;
    for (std::uint64_t n : n_values) max_n = std::max(max_n, n);

    Rng rng(0xbe7cULL);
    ChainStore store;
    std::vector<ProductTree> trees;
    for (std::uint32_t m : m_values) {
        trees.emplace_back(TreeConfig{m, 48});
    }

    std::vector<Checkpoint> checkpoints;
    Hash256 prev = genesis_prev_hash(params);
    for (std::uint64_t i = 1; i <= max_n; ++i) {
        std::vector<Transaction> txs;
        txs.push_back(Transaction::create(rng.random_bytes(24), seeded_sender(rng), i));
        Block block = mine_block(prev, std::move(txs), 0);
        store.append_with_summary(block, params);
        prev = store.head_hash();
        for (ProductTree& tree : trees) {
            tree.append(BlockExponent{store.exponent_at(i)});
        }
        if (std::find(n_values.begin(), n_values.end(), i) != n_values.end()) {
            checkpoints.push_back(Checkpoint{i, store, trees});
        }
    }

    auto measure = [&](std::uint64_t n, const std::string& op, auto&& fn) {
        // Warm-up run also captures the exact operation counts.
        ops::reset_counters();
        fn();
        OpCounters counts = ops::counters();
        double start = now_ms();
        for (unsigned rep = 0; rep < repetitions; ++rep) fn();
        double elapsed = now_ms() - start;
        report.rows.push_back(BenchRow{n, op, elapsed / repetitions, counts});
    };

    for (const Checkpoint& cp : checkpoints) {
        const std::uint64_t n = cp.n;
        const std::uint64_t mid = (n + 1) / 2;

        mpz_class extra_exponent = rng.uniform_bits(params.exponent_bits());
        if (extra_exponent == 0) extra_exponent = 1;
        measure(n, "summary_append", [&] {
            summary_append(cp.store.head_summary(), BlockExponent{extra_exponent}, params);
        });

        std::vector<Bytes> blocks;
        blocks.reserve(n);
        for (std::uint64_t i = 1; i <= n; ++i) blocks.push_back(cp.store.encoded_block(i));
        measure(n, "prove_naive[i=n/2]", [&] {
            prove_naive(blocks, mid, params, cp.store.exponents());
        });

        for (std::size_t t = 0; t < m_values.size(); ++t) {
            measure(n, "prove_fast[m=" + std::to_string(m_values[t]) + ",i=n/2]", [&] {
                prove_fast(cp.store, cp.trees[t], mid, params);
            });
        }

        MembershipProof proof = prove_fast(cp.store, cp.trees[0], mid, params);
        const Bytes& block_bytes = cp.store.encoded_block(mid);
        Summary head = cp.store.head_summary();
        measure(n, "verify", [&] {
            verify_proof(block_bytes, mid, proof, head, params);
        });
    }
    return report;
}

std::string BenchReport::to_csv() const {
    std::ostringstream out;
    out << "n,operation,mean_ms,hashes,multiplications,modexps\n";
    for (const BenchRow& row : rows) {
        out << row.n << "," << row.operation << "," << row.mean_ms << ","
            << row.counts.hashes << "," << row.counts.multiplications << ","
            << row.counts.modexps << "\n";
    }
    return out.str();
}

std::vector<StorageRow> storage_report(const PublicParams& params,
                                       const std::vector<std::uint64_t>& n_values,
                                       std::uint32_t branching_m) {
    std::uint64_t max_n = 0;
    for (std::uint64_t n : n_values) max_n = std::max(max_n, n);

    Rng rng(0x57075ULL);
    ChainStore store;
    ProductTree tree(TreeConfig{branching_m, 48});
    Hash256 prev = genesis_prev_hash(params);

    std::vector<StorageRow> rows;
    for (std::uint64_t i = 1; i <= max_n; ++i) {
        std::vector<Transaction> txs;
        txs.push_back(Transaction::create(rng.random_bytes(24), seeded_sender(rng), i));
        Block block = mine_block(prev, std::move(txs), 0);
        store.append_with_summary(block, params);
        prev = store.head_hash();
        tree.append(BlockExponent{store.exponent_at(i)});

        if (std::find(n_values.begin(), n_values.end(), i) != n_values.end()) {
            ClientState client(params);
            client.adopt_summary(store.head_summary());
            StorageRow row;
            row.n = i;
            row.client_state_bytes = client.serialize().size();
            row.tree_bytes = tree.serialize().size();
            row.chain_bytes = store.serialize().size();
            double levels = std::log(static_cast<double>(i)) /
                                std::log(static_cast<double>(branching_m)) +
                            1.0;
            row.tree_formula_bytes =
                levels * static_cast<double>(i) * params.exponent_bits() / 8.0;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string storage_csv(const std::vector<StorageRow>& rows) {
    std::ostringstream out;
    out << "n,client_state_bytes,tree_bytes,chain_bytes,tree_formula_bytes\n";
    for (const StorageRow& row : rows) {
        out << row.n << "," << row.client_state_bytes << "," << row.tree_bytes << ","
            << row.chain_bytes << "," << row.tree_formula_bytes << "\n";
    }
    return out.str();
}

}  // namespace epbc
