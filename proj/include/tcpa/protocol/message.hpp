// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tcpa/bytes.hpp"
#include "tcpa/crypto.hpp"

#include <optional>

// Wire protocol: framing and typed payloads.
//
// Every message travels as one frame:
//
//   "TCPA" | u8 version | u8 type | u32 big-endian payload length | payload
//
// Payload lengths above 64 MiB are rejected outright. Unknown type bytes
// are errors, never skipped: the protocol has no extension negotiation.

namespace tcpa::protocol
{
struct FrameError : std::runtime_error
{
    enum class Kind
    {
        BadMagic,
        BadVersion,
        UnknownType,
        LengthMismatch,
        Oversize,
    };

    FrameError(Kind k, const std::string& msg) : std::runtime_error{msg}, kind{k} {}

    Kind kind;
};

enum class MsgType : uint8_t
{
    Hello = 1,
    AgreeParams = 2,
    RequestAttestation = 3,
    AttestationResponse = 4,
    KeyShare = 5,
    SubmitJob = 6,
    ComplianceResult = 7,
    Forward = 8,
    Error = 9,
};

const char* msg_type_name(MsgType t) noexcept;

constexpr uint8_t PROTOCOL_VERSION = 1;
constexpr uint32_t MAX_PAYLOAD = 64u << 20;

struct ProtocolMessage
{
    MsgType type = MsgType::Hello;
    Bytes payload;

    bool operator==(const ProtocolMessage&) const = default;
};

Bytes encode_frame(const ProtocolMessage& m);
/// Decodes one complete frame; the input must be exactly one frame.
ProtocolMessage decode_frame(BytesView bytes);

/// Frame length implied by a header prefix (>= 10 bytes), for stream
/// reassembly. Validates magic/version/type/size.
size_t frame_length(BytesView header);
constexpr size_t FRAME_HEADER_SIZE = 10;

// Typed payloads. Each encodes to the payload bytes of its frame and
// decodes with exact-consumption checks (DecodeError on malformed input).

enum class Role : uint8_t
{
    provider = 1,
    consumer = 2,
};

struct Hello
{
    uint64_t session_id = 0;
    Role role = Role::provider;

    bool operator==(const Hello&) const = default;
};

struct AgreeParams
{
    crypto::Digest x_digest{};
    crypto::Digest b_digest{};
    crypto::Digest p_digest{};

    bool operator==(const AgreeParams&) const = default;
};

struct AttestationResponse
{
    Bytes pc;   // encoded PlatformCertificate
    Bytes icc;  // encoded IcCertificate

    bool operator==(const AttestationResponse&) const = default;
};

struct KeyShare
{
    Bytes share;
    /// Signature over the share by IC_priv; empty in the provider's
    /// direction (the base protocol gives the provider no key).
    Bytes signature;

    bool operator==(const KeyShare&) const = default;
};

struct SubmitJob
{
    Bytes s_t;  // S encrypted under the session key T
    Bytes e;    // candidate executable

    bool operator==(const SubmitJob&) const = default;
};

struct ComplianceResult
{
    Bytes cc;  // encoded ComplianceCertificate

    bool operator==(const ComplianceResult&) const = default;
};

struct Forward
{
    Bytes pc;
    Bytes icc;
    Bytes cc;
    std::optional<Bytes> oc;

    bool operator==(const Forward&) const = default;
};

enum class ErrorCode : uint32_t
{
    ProtocolViolation = 1,
    DecryptFailed = 2,
    BuildFailed = 3,
    AnalysisFailed = 4,
    ParamsMismatch = 5,
    VerifyFailed = 6,
};

const char* error_code_name(ErrorCode c) noexcept;

struct ErrorMsg
{
    ErrorCode code = ErrorCode::ProtocolViolation;
    std::string text;

    bool operator==(const ErrorMsg&) const = default;
};

ProtocolMessage make_hello(const Hello& h);
ProtocolMessage make_agree_params(const AgreeParams& p);
ProtocolMessage make_request_attestation();
ProtocolMessage make_attestation_response(const AttestationResponse& r);
ProtocolMessage make_key_share(const KeyShare& k);
ProtocolMessage make_submit_job(const SubmitJob& j);
ProtocolMessage make_compliance_result(const ComplianceResult& r);
ProtocolMessage make_forward(const Forward& f);
ProtocolMessage make_error(ErrorCode code, std::string_view text);

Hello parse_hello(const ProtocolMessage& m);
AgreeParams parse_agree_params(const ProtocolMessage& m);
AttestationResponse parse_attestation_response(const ProtocolMessage& m);
KeyShare parse_key_share(const ProtocolMessage& m);
SubmitJob parse_submit_job(const ProtocolMessage& m);
ComplianceResult parse_compliance_result(const ProtocolMessage& m);
Forward parse_forward(const ProtocolMessage& m);
ErrorMsg parse_error(const ProtocolMessage& m);

}  // namespace tcpa::protocol
