// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tcpa/protocol/message.hpp"

#include <memory>
#include <utility>

// Transport: the protocol assumes nothing more than a reliable ordered
// byte stream per session. Two bindings are provided: an in-process
// duplex pipe (tests, loopback benchmarks) and local TCP sockets (the
// reference binding for the provider/consumer command-line actors).

namespace tcpa::protocol
{
struct TransportError : std::runtime_error
{
    enum class Kind
    {
        Closed,  // peer closed mid-frame, or operation on a closed stream
        Io,      // OS-level failure
    };

    TransportError(Kind k, const std::string& msg) : std::runtime_error{msg}, kind{k} {}

    Kind kind;
};

/// One endpoint of a reliable ordered byte stream.
class Stream
{
public:
    virtual ~Stream() = default;

    /// Writes all of `data` (blocking).
    virtual void write(BytesView data) = 0;
    /// Blocks until at least one byte is available; returns the number of
    /// bytes read (<= max), or 0 once the peer has closed and all buffered
    /// bytes are drained.
    virtual size_t read(uint8_t* out, size_t max) = 0;
    virtual void close() = 0;
};

void send_frame(Stream& s, const ProtocolMessage& m);
/// Reads exactly one frame. Throws TransportError{Closed} on EOF (clean
/// EOF before any header byte included) and FrameError on malformed
/// framing.
ProtocolMessage recv_frame(Stream& s);

/// Cross-connected in-process byte queues; both ends are thread-safe.
std::pair<std::unique_ptr<Stream>, std::unique_ptr<Stream>> memory_pipe();

/// Listening socket bound to 127.0.0.1. Port 0 picks an ephemeral port;
/// port() reports the bound one.
class TcpListener
{
public:
    explicit TcpListener(uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    uint16_t port() const noexcept { return m_port; }
    std::unique_ptr<Stream> accept();

private:
    int m_fd = -1;
    uint16_t m_port = 0;
};

std::unique_ptr<Stream> tcp_connect(const std::string& host, uint16_t port);

}  // namespace tcpa::protocol
