// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Simulated multi-node network for protocol and attack scenarios, plus the
// benchmark and storage-accounting suites. Scenarios are fully deterministic
// given their seed; benchmarks report exact operation counts next to
// wall-clock means because the counts are what transfer across hardware.

#ifndef EPBC_HARNESS_HPP
#define EPBC_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "epbc/lightclient.hpp"
#include "epbc/node.hpp"

namespace epbc {

struct Scenario {
    std::uint64_t seed = 1;
    std::uint64_t chain_length = 32;
    std::uint8_t difficulty_bits = 4;
    std::vector<Strategy> peer_strategies = {Strategy::Honest, Strategy::Honest,
                                             Strategy::Honest, Strategy::Honest,
                                             Strategy::Honest};
    std::size_t sample_l = 5;
    std::size_t spot_checks_k = 3;
    unsigned confirmation_depth = 6;
    unsigned params_bits = 512;  // used only when no params are supplied
    std::uint64_t stale_lag = 5;

    static Scenario from_json(const std::string& text);
    static Scenario from_json_file(const std::string& path);
    std::string to_json() const;
};

struct ScenarioOutcome {
    bool adopted = false;          // false = NoMajority
    Summary adopted_summary;       // meaningful when adopted
    Summary honest_summary;
    bool adopted_matches_honest = false;
    std::string probe_tx_verdict;  // verdict for a transaction on the honest chain
    std::string ghost_tx_verdict;  // verdict for a transaction on no chain
    std::vector<PeerVerdict> peer_verdicts;
    std::vector<Strategy> sampled_strategies;

    // Deterministic text record; byte-identical for identical seeds.
    std::string to_record() const;
};

ScenarioOutcome run_scenario(const Scenario& scenario);
ScenarioOutcome run_scenario(const Scenario& scenario, const PublicParams& params);

struct BenchRow {
    std::uint64_t n = 0;
    std::string operation;
    double mean_ms = 0.0;
    OpCounters counts;  // exact counts for one execution
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::string to_csv() const;  // header: n,operation,mean_ms,hashes,multiplications,modexps
};

// Measures summary_append, prove_naive, prove_fast and verify across chain
// sizes; proof indices are n/2 (and both tree branchings). repetitions >= 10
// per cell for the wall-clock mean.
BenchReport bench_suite(const PublicParams& params,
                        const std::vector<std::uint64_t>& n_values = {64, 256, 1024, 4096},
                        const std::vector<std::uint32_t>& m_values = {2, 4},
                        unsigned repetitions = 10);

struct StorageRow {
    std::uint64_t n = 0;
    std::uint64_t client_state_bytes = 0;
    std::uint64_t tree_bytes = 0;       // serialized snapshot
    std::uint64_t chain_bytes = 0;      // serialized chain file
    double tree_formula_bytes = 0.0;    // (log_m n + 1) * n * exponent_bits / 8
};

std::vector<StorageRow> storage_report(const PublicParams& params,
                                       const std::vector<std::uint64_t>& n_values,
                                       std::uint32_t branching_m = 2);
std::string storage_csv(const std::vector<StorageRow>& rows);

// Deterministic chain builder shared by scenarios, benchmarks and tests:
// one payload transaction per block, seeded content, one probe transaction
// at `probe_position` (0 = none).
ChainStore build_test_chain(const PublicParams& params, std::uint64_t length,
                            std::uint8_t difficulty_bits, Rng& rng,
                            std::uint64_t probe_position = 0,
                            Hash256* probe_txid = nullptr);

}  // namespace epbc

#endif
