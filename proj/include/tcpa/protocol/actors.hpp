// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tcpa/certs.hpp"
#include "tcpa/protocol/transport.hpp"
#include "tcpa/tee_sim.hpp"

// The two protocol actors.
//
// The provider (Alice) holds the confidential source S and drives the
// session; the consumer (Bob) hosts the platform, relays messages into
// the isolated computation, and ends up holding the certificate chain.
// One session per stream:
//
//   Hello            ->    <- Hello
//   AgreeParams      ->    <- AgreeParams        (digest agreement)
//   RequestAttestation ->  <- AttestationResponse (PC, ICC)
//   KeyShare         ->    <- KeyShare            (signed by IC_priv)
//   SubmitJob        ->    <- ComplianceResult    (CC)
//   Forward          ->                           (chain, plus OC if keyed)
//
// Either side aborts permanently on a verification failure; an aborted
// session only ever emits Error frames.

namespace tcpa::protocol
{
/// Session phases, in the only order they may be entered.
enum class Phase : uint8_t
{
    init = 0,
    attesting = 1,
    negotiated = 2,
    submitted = 3,
    done = 4,
    aborted = 5,
};

const char* phase_name(Phase p) noexcept;

/// Phase transitions of one session end, in order of entry. Survives a
/// failed run when passed in by the caller.
struct SessionTrace
{
    std::vector<Phase> phases;
};

struct ProviderError : std::runtime_error
{
    enum class Kind
    {
        AttestationFailed,  // chain stages 1-3; `step` names the stage
        NegotiationFailed,  // hello/params/key-share disagreement
        TransportError,
        IcError,  // Error frame from the peer, or an unusable CC; see `code`
    };

    ProviderError(Kind k, const std::string& msg) : std::runtime_error{msg}, kind{k} {}

    Kind kind;
    certs::VerifyStep step = certs::VerifyStep::pc_signature;  // AttestationFailed only
    ErrorCode code = ErrorCode::ProtocolViolation;             // IcError only
};

struct ConsumerError : std::runtime_error
{
    enum class Kind
    {
        ProtocolViolation,  // unexpected or malformed message from the peer
        ParamsMismatch,     // AgreeParams digests disagree with local images
        TransportError,
        PeerError,  // Error frame from the provider
        IcAborted,  // the local isolated computation answered with an Error
    };

    ConsumerError(Kind k, const std::string& msg) : std::runtime_error{msg}, kind{k} {}

    Kind kind;
    ErrorCode code = ErrorCode::ProtocolViolation;  // PeerError / IcAborted
};

struct ProviderOutcome
{
    certs::CertificateChain chain;
    std::vector<Phase> phases;
};

/// Runs a full provider session over the stream. Attestation verifies
/// chain stages 1-3 against m_exp = measure(x_code, b_config, p_props)
/// before any key material or job leaves; the returned CC has been
/// checked against IC_pub, h(S) and the submitted executable. When
/// a_key is given, the chain carries an origin certificate and the
/// Forward message includes it.
ProviderOutcome provider_run(Stream& stream, BytesView rot_pub, BytesView x_code,
    BytesView b_config, BytesView p_props, BytesView source, BytesView executable,
    const std::optional<crypto::KeyPair>& a_key, crypto::RandomSource& rng,
    SessionTrace* trace = nullptr);

struct ConsumerOutcome
{
    certs::CertificateChain chain;
    certs::VerifyOutcome verdict;
    std::vector<Phase> phases;
};

/// Serves one provider session: answers hello/params/attestation from
/// the platform's certificates, relays KeyShare and SubmitJob into the
/// isolated computation, and verifies the forwarded chain against the
/// local images (require_all_valid semantics).
ConsumerOutcome consumer_serve(Stream& stream, tee::Platform& platform, uint64_t ic_id,
    BytesView rot_pub, BytesView x_code, BytesView b_config, BytesView p_props,
    const std::optional<Bytes>& a_pub, SessionTrace* trace = nullptr);

/// Offline chain verification against locally held images:
/// verify_chain with m_exp = measure(x_code, b_config, p_props) and
/// require_all_valid = true.
certs::VerifyOutcome consumer_verify(const certs::CertificateChain& chain, BytesView rot_pub,
    BytesView x_code, BytesView b_config, BytesView p_props,
    const std::optional<Bytes>& a_pub = std::nullopt);

}  // namespace tcpa::protocol
