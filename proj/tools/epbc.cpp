// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Single entry point binding every module: parameter setup (single-party and
// ceremony), mining, proof generation and verification, the TCP prover,
// light-client operations, benchmarks and scenario simulation.
//
// Exit codes: 0 success, 1 protocol rejection (failed verification, no
// majority, unconfirmed/invalid transaction), 2 usage or input errors.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "epbc/ceremony.hpp"
#include "epbc/encoding.hpp"
#include "epbc/errors.hpp"
#include "epbc/harness.hpp"
#include "epbc/lightclient.hpp"
#include "epbc/node.hpp"
#include "epbc/prooftree.hpp"
#include "epbc/transport.hpp"

namespace {

using namespace epbc;

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;
constexpr int kExitUsage = 2;

constexpr char kProofMagic[7] = {'E', 'P', 'B', 'C', 'P', 'R', 'F'};
constexpr std::uint8_t kProofVersion = 1;

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path);
    }
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
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

PublicParams load_params(const std::string& path) {
    return PublicParams::decode(read_file(path));
}

// Proof file: magic | version | index u64 | var-bytes block | p1 | p2.
void write_proof_file(const std::string& path, std::uint64_t index, const Bytes& block,
                      const MembershipProof& proof) {
    ByteWriter w;
    w.raw(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(kProofMagic), sizeof(kProofMagic)));
    w.u8(kProofVersion);
    w.u64(index);
    w.var_bytes(block);
    w.bigint(proof.p1.value);
    w.bigint(proof.p2);
    write_file(path, w.bytes());
}

struct ProofFile {
    std::uint64_t index;
    Bytes block;
    MembershipProof proof;
};

ProofFile read_proof_file(const std::string& path) {
    Bytes data = read_file(path);
    ByteReader r(data);
    Bytes magic = r.raw(sizeof(kProofMagic));
    if (std::memcmp(magic.data(), kProofMagic, sizeof(kProofMagic)) != 0) {
        throw Error(ErrorCode::MalformedEncoding, "bad proof magic");
    }
    if (r.u8() != kProofVersion) {
        throw Error(ErrorCode::MalformedEncoding, "unsupported proof version");
    }
    ProofFile f;
    f.index = r.u64();
    f.block = r.var_bytes();
    f.proof.p1.value = r.bigint();
    f.proof.p2 = r.bigint();
    r.expect_end();
    return f;
}

std::vector<PeerChannel*> connect_peers(const std::string& peer_list,
                                        std::vector<std::unique_ptr<TcpChannel>>& owned) {
    std::vector<PeerChannel*> out;
    std::size_t start = 0;
    while (start <= peer_list.size()) {
        std::size_t comma = peer_list.find(',', start);
        std::string endpoint = peer_list.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!endpoint.empty()) {
            auto [host, port] = parse_endpoint(endpoint);
            owned.push_back(std::make_unique<TcpChannel>(host, port));
            out.push_back(owned.back().get());
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) {
        throw Error(ErrorCode::MalformedEncoding, "no peers given");
    }
    return out;
}

volatile std::sig_atomic_t g_stop = 0;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EPBC: constant-size blockchain summaries and membership proofs"};
    app.require_subcommand(1);

    // --- setup ---
    auto* setup = app.add_subcommand("setup", "Generate parameters locally (dev/test path)");
    unsigned setup_bits = 1024;
    std::optional<std::uint64_t> setup_seed;
    std::string setup_out = "params.epbc";
    setup->add_option("--bits", setup_bits, "Modulus size in bits")->capture_default_str();
    setup->add_option("--seed", setup_seed, "Deterministic seed");
    setup->add_option("--out", setup_out, "Output parameter file")->capture_default_str();

    // --- ceremony ---
    auto* ceremony = app.add_subcommand("ceremony", "Multi-party parameter generation");
    CeremonyOptions ceremony_options;
    std::uint64_t ceremony_seed = 1;
    std::string ceremony_out = "params.epbc";
    std::string transcript_out;
    ceremony->add_option("--parties", ceremony_options.parties, "Number of parties")
        ->capture_default_str();
    ceremony->add_option("--bits", ceremony_options.bits, "Modulus size in bits")
        ->capture_default_str();
    ceremony->add_option("--rounds", ceremony_options.test_rounds, "Biprimality rounds")
        ->capture_default_str();
    ceremony->add_option("--seed", ceremony_seed, "Deterministic seed")->capture_default_str();
    ceremony->add_option("--out", ceremony_out, "Output parameter file")
        ->capture_default_str();
    ceremony->add_option("--transcript-out", transcript_out, "Audit transcript file");

    // --- mine ---
    auto* mine = app.add_subcommand("mine", "Extend (or create) a chain with mined blocks");
    std::string mine_params, mine_chain = "chain.epbc";
    std::uint64_t mine_count = 1;
    unsigned mine_difficulty = 8;
    std::uint64_t mine_seed = 1;
    std::uint64_t mine_txs = 1;
    mine->add_option("--params", mine_params, "Parameter file")->required();
    mine->add_option("--chain", mine_chain, "Chain file")->capture_default_str();
    mine->add_option("--count", mine_count, "Blocks to mine")->capture_default_str();
    mine->add_option("--difficulty", mine_difficulty, "Leading zero bits")
        ->capture_default_str();
    mine->add_option("--seed", mine_seed, "Transaction content seed")->capture_default_str();
    mine->add_option("--txs-per-block", mine_txs, "Transactions per block")
        ->capture_default_str();

    // --- prove ---
    auto* prove = app.add_subcommand("prove", "Generate a membership proof for a block");
    std::string prove_params, prove_chain, prove_out = "proof.epbc";
    std::uint64_t prove_index = 0;
    std::uint32_t prove_m = 2;
    prove->add_option("--params", prove_params, "Parameter file")->required();
    prove->add_option("--chain", prove_chain, "Chain file")->required();
    prove->add_option("--index", prove_index, "1-based block position")->required();
    prove->add_option("--out", prove_out, "Output proof file")->capture_default_str();
    prove->add_option("--branching", prove_m, "Product tree branching factor")
        ->capture_default_str();

    // --- verify ---
    auto* verify = app.add_subcommand("verify", "Verify a proof file against a chain summary");
    std::string verify_params, verify_chain, verify_proof_path;
    verify->add_option("--params", verify_params, "Parameter file")->required();
    verify->add_option("--chain", verify_chain, "Chain file (its head summary is trusted)")
        ->required();
    verify->add_option("--proof", verify_proof_path, "Proof file")->required();

    // --- serve ---
    auto* serve = app.add_subcommand("serve", "Serve proofs over TCP");
    std::string serve_params, serve_chain, serve_listen = "127.0.0.1:9101";
    std::uint32_t serve_m = 2;
    serve->add_option("--params", serve_params, "Parameter file")->required();
    serve->add_option("--chain", serve_chain, "Chain file")->required();
    serve->add_option("--listen", serve_listen, "host:port to listen on")
        ->capture_default_str();
    serve->add_option("--branching", serve_m, "Product tree branching factor")
        ->capture_default_str();

    // --- client ---
    auto* client = app.add_subcommand("client", "Light client operations");
    client->require_subcommand(1);

    auto* identify = client->add_subcommand("identify", "Bootstrap a trusted summary");
    std::string id_params, id_peers, id_state = "client.epbc";
    std::size_t id_l = 5, id_k = 3;
    std::uint64_t id_seed = 0;
    identify->add_option("--params", id_params, "Parameter file")->required();
    identify->add_option("--peers", id_peers, "Comma-separated host:port list")->required();
    identify->add_option("--state", id_state, "Client state file to write")
        ->capture_default_str();
    identify->add_option("--l", id_l, "Peers to sample")->capture_default_str();
    identify->add_option("--k", id_k, "Spot checks per candidate")->capture_default_str();
    identify->add_option("--seed", id_seed, "Sampling seed (0 = nondeterministic)");

    auto* verify_tx = client->add_subcommand("verify-tx", "Verify a transaction");
    std::string vt_params, vt_state, vt_peer, vt_txid;
    unsigned vt_depth = 6;
    verify_tx->add_option("--params", vt_params, "Parameter file")->required();
    verify_tx->add_option("--state", vt_state, "Client state file")->required();
    verify_tx->add_option("--peer", vt_peer, "host:port of a prover")->required();
    verify_tx->add_option("--txid", vt_txid, "Transaction id (64 hex chars)")->required();
    verify_tx->add_option("--depth", vt_depth, "Confirmation depth")->capture_default_str();

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "Operation benchmarks and op counts");
    std::string bench_params, bench_out;
    std::vector<std::uint64_t> bench_n = {64, 256, 1024, 4096};
    std::vector<std::uint32_t> bench_m = {2, 4};
    unsigned bench_reps = 10;
    bool bench_storage = false;
    bench->add_option("--params", bench_params, "Parameter file")->required();
    bench->add_option("--n", bench_n, "Chain sizes")->capture_default_str();
    bench->add_option("--m", bench_m, "Tree branching factors")->capture_default_str();
    bench->add_option("--reps", bench_reps, "Repetitions per cell")->capture_default_str();
    bench->add_option("--out", bench_out, "CSV output file (default stdout)");
    bench->add_flag("--storage", bench_storage, "Also emit the storage report");

    // --- simulate ---
    auto* simulate = app.add_subcommand("simulate", "Run a network scenario");
    std::string sim_scenario, sim_out;
    simulate->add_option("--scenario", sim_scenario, "Scenario JSON file")->required();
    simulate->add_option("--out", sim_out, "Outcome record file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints the message / help text
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*setup) {
            DevSetupResult result = dev_setup(setup_bits, setup_seed);
            // Factors are dropped on the floor here, as they must be.
            write_file(setup_out, result.params.encode());
            std::cout << "wrote " << setup_out << " ("
                      << mpz_sizeinbase(result.params.modulus_N.get_mpz_t(), 2)
                      << "-bit N)\n";
            return kExitOk;
        }

        if (*ceremony) {
            CeremonyResult result = run_ceremony(ceremony_options, ceremony_seed);
            write_file(ceremony_out, result.params.encode());
            std::cout << "ceremony accepted a modulus after "
                      << result.transcript.rounds.size() << " biprimality rounds\n";
            if (!transcript_out.empty()) {
                result.transcript.save(transcript_out);
                std::cout << "transcript written to " << transcript_out << "\n";
            }
            std::cout << "wrote " << ceremony_out << "\n";
            return kExitOk;
        }

        if (*mine) {
            PublicParams params = load_params(mine_params);
            ChainStore store;
            if (std::filesystem::exists(mine_chain)) {
                store = ChainStore::load(mine_chain);
                store.validate(params);
            }
            Rng rng(mine_seed + store.height());
            for (std::uint64_t i = 0; i < mine_count; ++i) {
                std::vector<Transaction> txs;
                for (std::uint64_t t = 0; t < mine_txs; ++t) {
                    std::array<std::uint8_t, 32> sender{};
                    Bytes raw = rng.random_bytes(sender.size());
                    std::copy(raw.begin(), raw.end(), sender.begin());
                    txs.push_back(Transaction::create(rng.random_bytes(32), sender,
                                                      store.height() + 1));
                }
                Hash256 prev = store.height() == 0 ? genesis_prev_hash(params)
                                                   : store.head_hash();
                Block block =
                    mine_block(prev, std::move(txs), static_cast<std::uint8_t>(mine_difficulty));
                store.append_with_summary(block, params);
            }
            store.save(mine_chain);
            std::cout << "chain height " << store.height() << ", head summary "
                      << store.head_summary().value.get_str(16).substr(0, 16) << "...\n";
            return kExitOk;
        }

        if (*prove) {
            PublicParams params = load_params(prove_params);
            ChainStore store = ChainStore::load(prove_chain);
            ProductTree tree(TreeConfig{prove_m, 48});
            for (std::uint64_t i = 1; i <= store.height(); ++i) {
                tree.append(BlockExponent{store.exponent_at(i)});
            }
            MembershipProof proof = prove_fast(store, tree, prove_index, params);
            write_proof_file(prove_out, prove_index, store.encoded_block(prove_index), proof);
            std::cout << "wrote " << prove_out << " for block " << prove_index << "\n";
            return kExitOk;
        }

        if (*verify) {
            PublicParams params = load_params(verify_params);
            ChainStore store = ChainStore::load(verify_chain);
            ProofFile f = read_proof_file(verify_proof_path);
            bool ok = verify_proof(f.block, f.index, f.proof, store.head_summary(), params);
            std::cout << (ok ? "accept" : "reject") << "\n";
            return ok ? kExitOk : kExitRejected;
        }

        if (*serve) {
            PublicParams params = load_params(serve_params);
            ChainStore store = ChainStore::load(serve_chain);
            store.validate(params);
            ProverState state = ProverState::from_chain(params, store, TreeConfig{serve_m, 48});
            auto handler = byzantine_wrap(state, Strategy::Honest);
            auto [host, port] = parse_endpoint(serve_listen);
            TcpServer server(*handler, host, port);
            std::cout << "serving " << state.store().height() << " blocks on " << host << ":"
                      << server.port() << std::endl;
            std::signal(SIGINT, [](int) { g_stop = 1; });
            std::signal(SIGTERM, [](int) { g_stop = 1; });
            while (!g_stop) {
                std::this_thread::sleep_for(std::chrono::milliseconds(100));
            }
            server.stop();
            return kExitOk;
        }

        if (*identify) {
            PublicParams params = load_params(id_params);
            std::vector<std::unique_ptr<TcpChannel>> owned;
            std::vector<PeerChannel*> peers = connect_peers(id_peers, owned);
            Rng rng(id_seed != 0 ? id_seed
                                 : static_cast<std::uint64_t>(
                                       std::chrono::steady_clock::now().time_since_epoch().count()));
            try {
                IdentifyOutcome outcome =
                    identify_chain(peers, params, IdentifyOptions{id_l, id_k}, rng);
                ClientState state(params);
                state.adopt_summary(outcome.adopted);
                state.save(id_state);
                std::cout << "adopted summary at height " << outcome.adopted.height
                          << ", state written to " << id_state << "\n";
                return kExitOk;
            } catch (const Error& e) {
                if (e.code() == ErrorCode::NoMajority) {
                    std::cout << "no majority summary\n";
                    return kExitRejected;
                }
                throw;
            }
        }

        if (*verify_tx) {
            PublicParams params = load_params(vt_params);
            ClientState state = ClientState::load(vt_state, params, vt_depth);
            auto [host, port] = parse_endpoint(vt_peer);
            TcpChannel peer(host, port);
            Bytes txid_bytes = from_hex(vt_txid);
            if (txid_bytes.size() != 32) {
                throw Error(ErrorCode::MalformedEncoding, "txid must be 32 bytes of hex");
            }
            Hash256 txid;
            std::copy(txid_bytes.begin(), txid_bytes.end(), txid.begin());
            TxVerdict verdict = verify_transaction(state, peer, txid);
            std::cout << tx_verdict_name(verdict) << "\n";
            return verdict == TxVerdict::Confirmed ? kExitOk : kExitRejected;
        }

        if (*bench) {
            PublicParams params = load_params(bench_params);
            BenchReport report = bench_suite(params, bench_n, bench_m, bench_reps);
            std::string csv = report.to_csv();
            if (bench_storage) {
                csv += "\n" + storage_csv(storage_report(params, bench_n, bench_m.front()));
            }
            if (bench_out.empty()) {
                std::cout << csv;
            } else {
                write_file(bench_out, Bytes(csv.begin(), csv.end()));
                std::cout << "wrote " << bench_out << "\n";
            }
            return kExitOk;
        }

        if (*simulate) {
            Scenario scenario = Scenario::from_json_file(sim_scenario);
            ScenarioOutcome outcome = run_scenario(scenario);
            std::string record = outcome.to_record();
            if (sim_out.empty()) {
                std::cout << record;
            } else {
                write_file(sim_out, Bytes(record.begin(), record.end()));
                std::cout << "wrote " << sim_out << "\n";
            }
            bool safe = !outcome.adopted || outcome.adopted_matches_honest;
            return safe ? kExitOk : kExitRejected;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
