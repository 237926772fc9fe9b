// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tcpa/protocol/message.hpp"

namespace tcpa::protocol
{
namespace
{
constexpr char MAGIC[4] = {'T', 'C', 'P', 'A'};

bool known_type(uint8_t t)
{
    return t >= static_cast<uint8_t>(MsgType::Hello) && t <= static_cast<uint8_t>(MsgType::Error);
}

ProtocolMessage wrap(MsgType t, ByteWriter&& w)
{
    return ProtocolMessage{t, std::move(w).take()};
}

ByteReader open_payload(const ProtocolMessage& m, MsgType want)
{
    if (m.type != want)
        throw DecodeError{std::string{"expected "} + msg_type_name(want) + " payload, got " +
                          msg_type_name(m.type)};
    return ByteReader{m.payload};
}

crypto::Digest read_digest(ByteReader& r)
{
    auto raw = r.raw(crypto::DIGEST_SIZE);
    crypto::Digest d{};
    std::copy(raw.begin(), raw.end(), d.begin());
    return d;
}
}  // namespace

const char* msg_type_name(MsgType t) noexcept
{
    switch (t) {
        case MsgType::Hello: return "Hello";
        case MsgType::AgreeParams: return "AgreeParams";
        case MsgType::RequestAttestation: return "RequestAttestation";
        case MsgType::AttestationResponse: return "AttestationResponse";
        case MsgType::KeyShare: return "KeyShare";
        case MsgType::SubmitJob: return "SubmitJob";
        case MsgType::ComplianceResult: return "ComplianceResult";
        case MsgType::Forward: return "Forward";
        case MsgType::Error: return "Error";
    }
    return "?";
}

const char* error_code_name(ErrorCode c) noexcept
{
    switch (c) {
        case ErrorCode::ProtocolViolation: return "ProtocolViolation";
        case ErrorCode::DecryptFailed: return "DecryptFailed";
        case ErrorCode::BuildFailed: return "BuildFailed";
        case ErrorCode::AnalysisFailed: return "AnalysisFailed";
        case ErrorCode::ParamsMismatch: return "ParamsMismatch";
        case ErrorCode::VerifyFailed: return "VerifyFailed";
    }
    return "?";
}

Bytes encode_frame(const ProtocolMessage& m)
{
    if (m.payload.size() > MAX_PAYLOAD)
        throw FrameError{FrameError::Kind::Oversize, "payload exceeds 64 MiB cap"};
    ByteWriter w;
    w.put_bytes(BytesView{reinterpret_cast<const uint8_t*>(MAGIC), 4});
    w.put_u8(PROTOCOL_VERSION);
    w.put_u8(static_cast<uint8_t>(m.type));
    w.put_be32(static_cast<uint32_t>(m.payload.size()));
    w.put_bytes(m.payload);
    return std::move(w).take();
}

size_t frame_length(BytesView header)
{
    if (header.size() < FRAME_HEADER_SIZE)
        throw FrameError{FrameError::Kind::LengthMismatch, "frame header truncated"};
    if (!std::equal(header.begin(), header.begin() + 4, MAGIC))
        throw FrameError{FrameError::Kind::BadMagic, "bad frame magic"};
    if (header[4] != PROTOCOL_VERSION)
        throw FrameError{FrameError::Kind::BadVersion,
                         "unsupported protocol version " + std::to_string(header[4])};
    if (!known_type(header[5]))
        throw FrameError{FrameError::Kind::UnknownType,
                         "unknown message type " + std::to_string(header[5])};
    uint32_t len = (uint32_t{header[6]} << 24) | (uint32_t{header[7]} << 16) |
                   (uint32_t{header[8]} << 8) | uint32_t{header[9]};
    if (len > MAX_PAYLOAD)
        throw FrameError{FrameError::Kind::Oversize, "payload length exceeds 64 MiB cap"};
    return FRAME_HEADER_SIZE + len;
}

ProtocolMessage decode_frame(BytesView bytes)
{
    size_t want = frame_length(bytes);
    if (bytes.size() != want)
        throw FrameError{FrameError::Kind::LengthMismatch,
                         "frame is " + std::to_string(bytes.size()) + " bytes, header declares " +
                             std::to_string(want)};
    ProtocolMessage m;
    m.type = static_cast<MsgType>(bytes[5]);
    m.payload.assign(bytes.begin() + FRAME_HEADER_SIZE, bytes.end());
    return m;
}

ProtocolMessage make_hello(const Hello& h)
{
    ByteWriter w;
    w.put_be64(h.session_id);
    w.put_u8(static_cast<uint8_t>(h.role));
    return wrap(MsgType::Hello, std::move(w));
}

Hello parse_hello(const ProtocolMessage& m)
{
    auto r = open_payload(m, MsgType::Hello);
    Hello h;
    h.session_id = r.be64();
    uint8_t role = r.u8();
    if (role != 1 && role != 2) throw DecodeError{"bad Hello role " + std::to_string(role)};
    h.role = static_cast<Role>(role);
    r.expect_done();
    return h;
}

ProtocolMessage make_agree_params(const AgreeParams& p)
{
    ByteWriter w;
    w.put_bytes(p.x_digest);
    w.put_bytes(p.b_digest);
    w.put_bytes(p.p_digest);
    return wrap(MsgType::AgreeParams, std::move(w));
}

AgreeParams parse_agree_params(const ProtocolMessage& m)
{
    auto r = open_payload(m, MsgType::AgreeParams);
    AgreeParams p;
    p.x_digest = read_digest(r);
    p.b_digest = read_digest(r);
    p.p_digest = read_digest(r);
    r.expect_done();
    return p;
}

ProtocolMessage make_request_attestation()
{
    return ProtocolMessage{MsgType::RequestAttestation, {}};
}

ProtocolMessage make_attestation_response(const AttestationResponse& a)
{
    ByteWriter w;
    w.put_field(a.pc);
    w.put_field(a.icc);
    return wrap(MsgType::AttestationResponse, std::move(w));
}

AttestationResponse parse_attestation_response(const ProtocolMessage& m)
{
    auto r = open_payload(m, MsgType::AttestationResponse);
    AttestationResponse a;
    a.pc = r.field();
    a.icc = r.field();
    r.expect_done();
    return a;
}

ProtocolMessage make_key_share(const KeyShare& k)
{
    ByteWriter w;
    w.put_field(k.share);
    w.put_field(k.signature);
    return wrap(MsgType::KeyShare, std::move(w));
}

KeyShare parse_key_share(const ProtocolMessage& m)
{
    auto r = open_payload(m, MsgType::KeyShare);
    KeyShare k;
    k.share = r.field();
    k.signature = r.field();
    r.expect_done();
    return k;
}

ProtocolMessage make_submit_job(const SubmitJob& j)
{
    ByteWriter w;
    w.put_field(j.s_t);
    w.put_field(j.e);
    return wrap(MsgType::SubmitJob, std::move(w));
}

SubmitJob parse_submit_job(const ProtocolMessage& m)
{
    auto r = open_payload(m, MsgType::SubmitJob);
    SubmitJob j;
    j.s_t = r.field();
    j.e = r.field();
    r.expect_done();
    return j;
}

ProtocolMessage make_compliance_result(const ComplianceResult& c)
{
    ByteWriter w;
    w.put_field(c.cc);
    return wrap(MsgType::ComplianceResult, std::move(w));
}

ComplianceResult parse_compliance_result(const ProtocolMessage& m)
{
    auto r = open_payload(m, MsgType::ComplianceResult);
    ComplianceResult c;
    c.cc = r.field();
    r.expect_done();
    return c;
}

ProtocolMessage make_forward(const Forward& f)
{
    ByteWriter w;
    w.put_field(f.pc);
    w.put_field(f.icc);
    w.put_field(f.cc);
    w.put_u8(f.oc ? 1 : 0);
    if (f.oc) w.put_field(*f.oc);
    return wrap(MsgType::Forward, std::move(w));
}

Forward parse_forward(const ProtocolMessage& m)
{
    auto r = open_payload(m, MsgType::Forward);
    Forward f;
    f.pc = r.field();
    f.icc = r.field();
    f.cc = r.field();
    uint8_t has_oc = r.u8();
    if (has_oc > 1) throw DecodeError{"bad Forward oc flag"};
    if (has_oc) f.oc = r.field();
    r.expect_done();
    return f;
}

ProtocolMessage make_error(ErrorCode code, std::string_view text)
{
    ByteWriter w;
    w.put_be32(static_cast<uint32_t>(code));
    w.put_field(to_bytes(text));
    return wrap(MsgType::Error, std::move(w));
}

ErrorMsg parse_error(const ProtocolMessage& m)
{
    auto r = open_payload(m, MsgType::Error);
    ErrorMsg e;
    uint32_t code = r.be32();
    if (code < 1 || code > 6) throw DecodeError{"bad error code " + std::to_string(code)};
    e.code = static_cast<ErrorCode>(code);
    e.text = to_string(r.field());
    r.expect_done();
    return e;
}

}  // namespace tcpa::protocol
