// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Byte-stream transports for the wire protocol. The same codec runs over an
// in-process channel (the simulation harness) and a TCP socket (the serve
// command); the protocol is transport-independent.

#ifndef EPBC_TRANSPORT_HPP
#define EPBC_TRANSPORT_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "epbc/node.hpp"
#include "epbc/wire.hpp"

namespace epbc {

class PeerChannel {
public:
    virtual ~PeerChannel() = default;
    // Sends one request frame and returns the response frame. Throws
    // Error(PeerUnreachable) on transport failure.
    virtual Bytes request_frame(std::span<const std::uint8_t> frame) = 0;

    // Convenience: message-level round trip.
    wire::Message request(const wire::Message& msg);
};

// Direct dispatch into a handler; optionally simulates an unreachable peer
// or a fixed per-request latency. Latency never changes protocol outcomes,
// only wall clock.
class InProcessChannel : public PeerChannel {
public:
    explicit InProcessChannel(RequestHandler& handler, bool reachable = true,
                              unsigned latency_ms = 0)
        : handler_(handler), reachable_(reachable), latency_ms_(latency_ms) {}

    Bytes request_frame(std::span<const std::uint8_t> frame) override;

private:
    RequestHandler& handler_;
    bool reachable_;
    unsigned latency_ms_;
};

// Blocking TCP client: one connection per request, framed per the protocol.
class TcpChannel : public PeerChannel {
public:
    TcpChannel(std::string host, std::uint16_t port)
        : host_(std::move(host)), port_(port) {}

    Bytes request_frame(std::span<const std::uint8_t> frame) override;

private:
    std::string host_;
    std::uint16_t port_;
};

// Minimal blocking TCP server: accepts connections and answers frames until
// stopped. Each connection is handled on its own thread; handlers must be
// safe for concurrent reads (ProverState::serve is).
class TcpServer {
public:
    TcpServer(RequestHandler& handler, const std::string& bind_host, std::uint16_t port);
    ~TcpServer();

    std::uint16_t port() const { return port_; }
    void stop();

private:
    void accept_loop();

    RequestHandler& handler_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic_bool stopping_{false};
    std::thread accept_thread_;
};

// "host:port" to (host, port); throws MalformedEncoding on bad syntax.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace epbc

#endif
