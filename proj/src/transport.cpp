// Copyright (c) 2026 The EPBC developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "epbc/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <thread>
#include <vector>

#include "epbc/errors.hpp"

namespace epbc {

namespace {

void close_quietly(int fd) {
    if (fd >= 0) ::close(fd);
}

bool send_all(int fd, const std::uint8_t* data, std::size_t len) {
    std::size_t sent = 0;
    while (sent < len) {
        ssize_t n = ::send(fd, data + sent, len - sent, 0);
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

bool recv_all(int fd, std::uint8_t* data, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
        ssize_t n = ::recv(fd, data + got, len - got, 0);
        if (n <= 0) return false;
        got += static_cast<std::size_t>(n);
    }
    return true;
}

// Reads one length-prefixed frame; empty result means clean EOF before any
// byte arrived.
bool read_frame(int fd, Bytes& out, bool& clean_eof) {
    std::uint8_t header[4];
    ssize_t first = ::recv(fd, header, 1, 0);
    if (first == 0) {
        clean_eof = true;
        return false;
    }
    if (first < 0 || !recv_all(fd, header + 1, 3)) return false;
    std::uint32_t length = (std::uint32_t(header[0]) << 24) | (std::uint32_t(header[1]) << 16) |
                           (std::uint32_t(header[2]) << 8) | std::uint32_t(header[3]);
    if (length == 0 || length > wire::kMaxFrameSize) return false;
    out.resize(4 + length);
    std::memcpy(out.data(), header, 4);
    return recv_all(fd, out.data() + 4, length);
}

}  // namespace

wire::Message PeerChannel::request(const wire::Message& msg) {
    Bytes reply = request_frame(wire::encode_frame(msg));
    return wire::decode_frame(reply);
}

Bytes InProcessChannel::request_frame(std::span<const std::uint8_t> frame) {
    if (!reachable_) {
        throw Error(ErrorCode::PeerUnreachable, "simulated unreachable peer");
    }
    if (latency_ms_ > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(latency_ms_));
    }
    return handler_.handle_frame(frame);
}

Bytes TcpChannel::request_frame(std::span<const std::uint8_t> frame) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    std::string port_str = std::to_string(port_);
    if (getaddrinfo(host_.c_str(), port_str.c_str(), &hints, &result) != 0) {
        throw Error(ErrorCode::PeerUnreachable, "cannot resolve " + host_);
    }

    int fd = -1;
    for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        close_quietly(fd);
        fd = -1;
    }
    freeaddrinfo(result);
    if (fd < 0) {
        throw Error(ErrorCode::PeerUnreachable,
                    "cannot connect to " + host_ + ":" + port_str);
    }

    Bytes reply;
    bool clean_eof = false;
    bool ok = send_all(fd, frame.data(), frame.size()) && read_frame(fd, reply, clean_eof);
    close_quietly(fd);
    if (!ok) {
        throw Error(ErrorCode::PeerUnreachable, "request to " + host_ + " failed");
    }
    return reply;
}

TcpServer::TcpServer(RequestHandler& handler, const std::string& bind_host, std::uint16_t port)
    : handler_(handler) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) {
        throw Error(ErrorCode::IoFailure, "socket() failed");
    }
    int one = 1;
    setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (bind_host.empty() || bind_host == "0.0.0.0") {
        addr.sin_addr.s_addr = INADDR_ANY;
    } else if (inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
        close_quietly(listen_fd_);
        throw Error(ErrorCode::IoFailure, "bad bind address " + bind_host);
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(listen_fd_, 16) != 0) {
        close_quietly(listen_fd_);
        throw Error(ErrorCode::IoFailure, "cannot listen on " + bind_host);
    }

    socklen_t len = sizeof(addr);
    getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);

    accept_thread_ = std::thread([this] { accept_loop(); });
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::stop() {
    if (stopping_.exchange(true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    close_quietly(listen_fd_);
    if (accept_thread_.joinable()) accept_thread_.join();
}

void TcpServer::accept_loop() {
    std::vector<std::thread> workers;
    while (!stopping_.load()) {
        int client = ::accept(listen_fd_, nullptr, nullptr);
        if (client < 0) break;
        workers.emplace_back([this, client] {
            Bytes frame;
            bool clean_eof = false;
            while (read_frame(client, frame, clean_eof)) {
                Bytes reply = handler_.handle_frame(frame);
                if (!send_all(client, reply.data(), reply.size())) break;
            }
            close_quietly(client);
        });
    }
    for (std::thread& t : workers) {
        if (t.joinable()) t.join();
    }
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint) {
    std::size_t colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size()) {
        throw Error(ErrorCode::MalformedEncoding, "expected host:port, got " + endpoint);
    }
    std::string host = endpoint.substr(0, colon);
    unsigned long port = std::stoul(endpoint.substr(colon + 1));
    if (port == 0 || port > 65535) {
        throw Error(ErrorCode::MalformedEncoding, "port out of range in " + endpoint);
    }
    return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace epbc
