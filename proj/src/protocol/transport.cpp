// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tcpa/protocol/transport.hpp"

#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

namespace tcpa::protocol
{
namespace
{
void read_exact(Stream& s, uint8_t* out, size_t n)
{
    size_t got = 0;
    while (got < n) {
        size_t r = s.read(out + got, n - got);
        if (r == 0)
            throw TransportError{TransportError::Kind::Closed, "peer closed mid-frame"};
        got += r;
    }
}

// Shared state of one in-process duplex pipe. Each direction is an
// independent byte queue; close() leaves buffered bytes readable and
// then yields EOF.
struct PipeCore
{
    std::mutex mu;
    std::condition_variable cv;
    std::deque<uint8_t> buf[2];
    bool closed[2] = {false, false};
};

class PipeEnd final : public Stream
{
public:
    PipeEnd(std::shared_ptr<PipeCore> core, int side) : m_core{std::move(core)}, m_side{side} {}

    ~PipeEnd() override { close(); }

    void write(BytesView data) override
    {
        std::lock_guard lk{m_core->mu};
        if (m_core->closed[m_side])
            throw TransportError{TransportError::Kind::Closed, "write on closed stream"};
        auto& q = m_core->buf[m_side];
        q.insert(q.end(), data.begin(), data.end());
        m_core->cv.notify_all();
    }

    size_t read(uint8_t* out, size_t max) override
    {
        int from = 1 - m_side;
        std::unique_lock lk{m_core->mu};
        auto& q = m_core->buf[from];
        m_core->cv.wait(lk, [&] { return !q.empty() || m_core->closed[from]; });
        if (q.empty()) return 0;
        size_t n = std::min(max, q.size());
        std::copy_n(q.begin(), n, out);
        q.erase(q.begin(), q.begin() + static_cast<ptrdiff_t>(n));
        return n;
    }

    void close() override
    {
        std::lock_guard lk{m_core->mu};
        m_core->closed[m_side] = true;
        m_core->cv.notify_all();
    }

private:
    std::shared_ptr<PipeCore> m_core;
    int m_side;
};

class TcpStream final : public Stream
{
public:
    explicit TcpStream(int fd) : m_fd{fd} {}

    ~TcpStream() override { close(); }

    void write(BytesView data) override
    {
        size_t off = 0;
        while (off < data.size()) {
            ssize_t n = ::send(m_fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                if (errno == EPIPE || errno == ECONNRESET)
                    throw TransportError{TransportError::Kind::Closed, "peer closed connection"};
                throw TransportError{TransportError::Kind::Io,
                                     std::string{"send: "} + std::strerror(errno)};
            }
            off += static_cast<size_t>(n);
        }
    }

    size_t read(uint8_t* out, size_t max) override
    {
        for (;;) {
            ssize_t n = ::recv(m_fd, out, max, 0);
            if (n >= 0) return static_cast<size_t>(n);
            if (errno == EINTR) continue;
            if (errno == ECONNRESET) return 0;
            throw TransportError{TransportError::Kind::Io,
                                 std::string{"recv: "} + std::strerror(errno)};
        }
    }

    void close() override
    {
        if (m_fd >= 0) {
            ::close(m_fd);
            m_fd = -1;
        }
    }

private:
    int m_fd;
};

sockaddr_in loopback(uint16_t port)
{
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    return addr;
}
}  // namespace

void send_frame(Stream& s, const ProtocolMessage& m)
{
    s.write(encode_frame(m));
}

ProtocolMessage recv_frame(Stream& s)
{
    uint8_t header[FRAME_HEADER_SIZE];
    size_t first = s.read(header, 1);
    if (first == 0) throw TransportError{TransportError::Kind::Closed, "stream closed"};
    read_exact(s, header + 1, FRAME_HEADER_SIZE - 1);
    size_t total = frame_length(BytesView{header, FRAME_HEADER_SIZE});
    Bytes frame(total);
    std::copy_n(header, FRAME_HEADER_SIZE, frame.begin());
    read_exact(s, frame.data() + FRAME_HEADER_SIZE, total - FRAME_HEADER_SIZE);
    return decode_frame(frame);
}

std::pair<std::unique_ptr<Stream>, std::unique_ptr<Stream>> memory_pipe()
{
    auto core = std::make_shared<PipeCore>();
    return {std::make_unique<PipeEnd>(core, 0), std::make_unique<PipeEnd>(core, 1)};
}

TcpListener::TcpListener(uint16_t port)
{
    m_fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (m_fd < 0)
        throw TransportError{TransportError::Kind::Io,
                             std::string{"socket: "} + std::strerror(errno)};
    int one = 1;
    ::setsockopt(m_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = loopback(port);
    if (::bind(m_fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
        ::listen(m_fd, 8) < 0) {
        int err = errno;
        ::close(m_fd);
        throw TransportError{TransportError::Kind::Io,
                             std::string{"bind/listen: "} + std::strerror(err)};
    }
    socklen_t len = sizeof addr;
    if (::getsockname(m_fd, reinterpret_cast<sockaddr*>(&addr), &len) < 0) {
        int err = errno;
        ::close(m_fd);
        throw TransportError{TransportError::Kind::Io,
                             std::string{"getsockname: "} + std::strerror(err)};
    }
    m_port = ntohs(addr.sin_port);
}

TcpListener::~TcpListener()
{
    if (m_fd >= 0) ::close(m_fd);
}

std::unique_ptr<Stream> TcpListener::accept()
{
    for (;;) {
        int fd = ::accept(m_fd, nullptr, nullptr);
        if (fd >= 0) {
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return std::make_unique<TcpStream>(fd);
        }
        if (errno == EINTR) continue;
        throw TransportError{TransportError::Kind::Io,
                             std::string{"accept: "} + std::strerror(errno)};
    }
}

std::unique_ptr<Stream> tcp_connect(const std::string& host, uint16_t port)
{
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0)
        throw TransportError{TransportError::Kind::Io,
                             std::string{"socket: "} + std::strerror(errno)};
    sockaddr_in addr = loopback(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw TransportError{TransportError::Kind::Io, "unsupported address: " + host};
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        int err = errno;
        ::close(fd);
        throw TransportError{TransportError::Kind::Io,
                             std::string{"connect: "} + std::strerror(err)};
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::make_unique<TcpStream>(fd);
}

}  // namespace tcpa::protocol
