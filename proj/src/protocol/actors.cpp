// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tcpa/protocol/actors.hpp"

#include <cstring>

namespace tcpa::protocol
{
namespace
{
void enter(std::vector<Phase>& trace, Phase p)
{
    if (trace.empty() || trace.back() != p) trace.push_back(p);
}

crypto::Digest digest_of(BytesView b)
{
    return crypto::hash(b);
}

// Provider-side receive: transport and framing problems become
// TransportError, an Error frame becomes IcError carrying the code.
ProtocolMessage provider_recv(Stream& s)
{
    ProtocolMessage m;
    try {
        m = recv_frame(s);
    } catch (const TransportError& e) {
        throw ProviderError{ProviderError::Kind::TransportError, e.what()};
    } catch (const FrameError& e) {
        throw ProviderError{ProviderError::Kind::TransportError, e.what()};
    }
    if (m.type == MsgType::Error) {
        ErrorMsg em = parse_error(m);
        ProviderError err{ProviderError::Kind::IcError,
                          std::string{"peer error: "} + error_code_name(em.code) + ": " + em.text};
        err.code = em.code;
        throw err;
    }
    return m;
}

ProtocolMessage provider_expect(Stream& s, MsgType want)
{
    ProtocolMessage m = provider_recv(s);
    if (m.type != want)
        throw ProviderError{ProviderError::Kind::NegotiationFailed,
                            std::string{"expected "} + msg_type_name(want) + ", peer sent " +
                                msg_type_name(m.type)};
    return m;
}

void provider_send(Stream& s, const ProtocolMessage& m)
{
    try {
        send_frame(s, m);
    } catch (const TransportError& e) {
        throw ProviderError{ProviderError::Kind::TransportError, e.what()};
    }
}

ProviderError attestation_failed(certs::VerifyStep step)
{
    ProviderError err{ProviderError::Kind::AttestationFailed,
                      std::string{"attestation failed at "} + certs::verify_step_name(step)};
    err.step = step;
    return err;
}

ProviderError ic_error(ErrorCode code, const std::string& msg)
{
    ProviderError err{ProviderError::Kind::IcError, msg};
    err.code = code;
    return err;
}

ProviderOutcome provider_session(Stream& stream, BytesView rot_pub, BytesView x_code,
    BytesView b_config, BytesView p_props, BytesView source, BytesView executable,
    const std::optional<crypto::KeyPair>& a_key, crypto::RandomSource& rng,
    std::vector<Phase>& trace)
{
    ProviderOutcome out;
    enter(trace, Phase::init);

    uint64_t sid = 0;
    {
        Bytes raw = rng.bytes(8);
        std::memcpy(&sid, raw.data(), 8);
    }
    provider_send(stream, make_hello({sid, Role::provider}));
    Hello peer_hello = parse_hello(provider_expect(stream, MsgType::Hello));
    if (peer_hello.session_id != sid || peer_hello.role != Role::consumer)
        throw ProviderError{ProviderError::Kind::NegotiationFailed, "hello mismatch"};

    AgreeParams mine{digest_of(x_code), digest_of(b_config), digest_of(p_props)};
    provider_send(stream, make_agree_params(mine));
    AgreeParams theirs = parse_agree_params(provider_expect(stream, MsgType::AgreeParams));
    if (!(theirs == mine))
        throw ProviderError{ProviderError::Kind::NegotiationFailed,
                            "parameter digests disagree"};

    enter(trace, Phase::attesting);
    provider_send(stream, make_request_attestation());
    AttestationResponse att =
        parse_attestation_response(provider_expect(stream, MsgType::AttestationResponse));
    certs::PlatformCertificate pc;
    try {
        pc = certs::decode_pc(att.pc);
    } catch (const certs::CertError&) {
        throw attestation_failed(certs::VerifyStep::pc_signature);
    }
    certs::IcCertificate icc;
    try {
        icc = certs::decode_icc(att.icc);
    } catch (const certs::CertError&) {
        throw attestation_failed(certs::VerifyStep::icc_signature);
    }
    crypto::Measurement m_exp = crypto::measure(x_code, b_config, p_props);
    if (certs::VerifyOutcome v = certs::verify_attestation(pc, icc, rot_pub, m_exp); !v.accepted)
        throw attestation_failed(v.step);

    crypto::DhKeyPair dh = crypto::dh_keypair(rng);
    provider_send(stream, make_key_share({dh.share_pub, {}}));
    KeyShare ic_share = parse_key_share(provider_expect(stream, MsgType::KeyShare));
    if (ic_share.share.size() != crypto::SHARE_SIZE ||
        !crypto::verify(ic_share.signature, ic_share.share, icc.ic_pub))
        throw ProviderError{ProviderError::Kind::NegotiationFailed,
                            "ic key share does not verify"};
    crypto::SymKey t = crypto::dh_shared(dh.share_priv, ic_share.share);
    enter(trace, Phase::negotiated);

    Bytes s_t = crypto::sym_encrypt(t, source, rng);
    provider_send(stream, make_submit_job({s_t, Bytes{executable.begin(), executable.end()}}));
    enter(trace, Phase::submitted);

    ComplianceResult result =
        parse_compliance_result(provider_expect(stream, MsgType::ComplianceResult));
    certs::ComplianceCertificate cc;
    try {
        cc = certs::decode_cc(result.cc);
    } catch (const certs::CertError&) {
        throw ic_error(ErrorCode::VerifyFailed, "compliance certificate malformed");
    }
    if (!certs::verify_cc(cc, icc.ic_pub))
        throw ic_error(ErrorCode::VerifyFailed, "compliance certificate signature invalid");
    if (cc.h_s != crypto::hash(source))
        throw ic_error(ErrorCode::VerifyFailed, "compliance certificate names a different source");
    crypto::Digest e_digest = digest_of(executable);
    if (cc.executable_digest() != e_digest)
        throw ic_error(ErrorCode::VerifyFailed,
                       "compliance certificate names a different executable");

    out.chain.pc = pc;
    out.chain.icc = icc;
    out.chain.cc = cc;
    Forward fwd{att.pc, att.icc, result.cc, std::nullopt};
    if (a_key) {
        certs::OriginCertificate oc = certs::issue_oc(cc.h_s, e_digest, *a_key);
        out.chain.oc = oc;
        fwd.oc = certs::encode_oc(oc);
    }
    provider_send(stream, make_forward(fwd));
    enter(trace, Phase::done);
    out.phases = trace;
    return out;
}

// Consumer-side receive/expect.
ProtocolMessage consumer_recv(Stream& s)
{
    try {
        return recv_frame(s);
    } catch (const TransportError& e) {
        throw ConsumerError{ConsumerError::Kind::TransportError, e.what()};
    } catch (const FrameError& e) {
        throw ConsumerError{ConsumerError::Kind::TransportError, e.what()};
    }
}

void consumer_send(Stream& s, const ProtocolMessage& m)
{
    try {
        send_frame(s, m);
    } catch (const TransportError& e) {
        throw ConsumerError{ConsumerError::Kind::TransportError, e.what()};
    }
}

// Answers an out-of-place message with an Error frame and gives up.
[[noreturn]] void consumer_violation(Stream& s, const std::string& what)
{
    try {
        send_frame(s, make_error(ErrorCode::ProtocolViolation, what));
    } catch (...) {
        // the peer may already be gone; the violation still aborts us
    }
    throw ConsumerError{ConsumerError::Kind::ProtocolViolation, what};
}

ProtocolMessage consumer_expect(Stream& s, MsgType want)
{
    ProtocolMessage m = consumer_recv(s);
    if (m.type == MsgType::Error) {
        ErrorMsg em = parse_error(m);
        ConsumerError err{ConsumerError::Kind::PeerError,
                          std::string{"peer error: "} + error_code_name(em.code) + ": " + em.text};
        err.code = em.code;
        throw err;
    }
    if (m.type != want)
        consumer_violation(s, std::string{"expected "} + msg_type_name(want) + ", peer sent " +
                                  msg_type_name(m.type));
    return m;
}

// Relays one message into the IC and every response back out. An Error
// response aborts the session after it has been forwarded.
ProtocolMessage relay_to_ic(Stream& s, tee::Platform& platform, uint64_t ic_id,
    const ProtocolMessage& msg)
{
    std::vector<ProtocolMessage> responses = platform.ic_handle_message(ic_id, msg);
    for (const ProtocolMessage& r : responses) consumer_send(s, r);
    for (const ProtocolMessage& r : responses) {
        if (r.type == MsgType::Error) {
            ErrorMsg em = parse_error(r);
            ConsumerError err{ConsumerError::Kind::IcAborted,
                              std::string{"ic error: "} + error_code_name(em.code) + ": " +
                                  em.text};
            err.code = em.code;
            throw err;
        }
    }
    if (responses.size() != 1)
        throw ConsumerError{ConsumerError::Kind::IcAborted, "ic produced no response"};
    return responses.front();
}

ConsumerOutcome consumer_session(Stream& stream, tee::Platform& platform, uint64_t ic_id,
    BytesView rot_pub, BytesView x_code, BytesView b_config, BytesView p_props,
    const std::optional<Bytes>& a_pub, std::vector<Phase>& trace)
{
    ConsumerOutcome out;
    enter(trace, Phase::init);

    Hello hello;
    try {
        hello = parse_hello(consumer_expect(stream, MsgType::Hello));
    } catch (const DecodeError& e) {
        consumer_violation(stream, e.what());
    }
    if (hello.role != Role::provider) consumer_violation(stream, "hello names the wrong role");
    consumer_send(stream, make_hello({hello.session_id, Role::consumer}));

    AgreeParams theirs;
    try {
        theirs = parse_agree_params(consumer_expect(stream, MsgType::AgreeParams));
    } catch (const DecodeError& e) {
        consumer_violation(stream, e.what());
    }
    AgreeParams mine{digest_of(x_code), digest_of(b_config), digest_of(p_props)};
    if (!(theirs == mine)) {
        try {
            send_frame(stream, make_error(ErrorCode::ParamsMismatch, "parameter digests disagree"));
        } catch (...) {
        }
        throw ConsumerError{ConsumerError::Kind::ParamsMismatch, "parameter digests disagree"};
    }
    consumer_send(stream, make_agree_params(mine));

    consumer_expect(stream, MsgType::RequestAttestation);
    enter(trace, Phase::attesting);
    AttestationResponse att{certs::encode_pc(platform.pc()),
                            certs::encode_icc(platform.ic_certificate(ic_id))};
    consumer_send(stream, make_attestation_response(att));

    ProtocolMessage share_msg = consumer_expect(stream, MsgType::KeyShare);
    relay_to_ic(stream, platform, ic_id, share_msg);
    enter(trace, Phase::negotiated);

    ProtocolMessage job_msg = consumer_expect(stream, MsgType::SubmitJob);
    ProtocolMessage result = relay_to_ic(stream, platform, ic_id, job_msg);
    if (result.type != MsgType::ComplianceResult)
        throw ConsumerError{ConsumerError::Kind::IcAborted, "ic answered the job with " +
                                                                std::string{msg_type_name(
                                                                    result.type)}};
    enter(trace, Phase::submitted);

    Forward fwd;
    try {
        fwd = parse_forward(consumer_expect(stream, MsgType::Forward));
    } catch (const DecodeError& e) {
        consumer_violation(stream, e.what());
    }
    crypto::Measurement m_exp = crypto::measure(x_code, b_config, p_props);
    out.verdict = certs::verify_chain_bytes(fwd.pc, fwd.icc, fwd.cc, fwd.oc, rot_pub, m_exp,
        /*require_all_valid=*/true, a_pub);
    try {
        out.chain.pc = certs::decode_pc(fwd.pc);
        out.chain.icc = certs::decode_icc(fwd.icc);
        out.chain.cc = certs::decode_cc(fwd.cc);
        if (fwd.oc) out.chain.oc = certs::decode_oc(*fwd.oc);
    } catch (const certs::CertError&) {
        // verdict already records the malformed certificate; keep the
        // prefix of the chain that decoded
    }
    enter(trace, Phase::done);
    out.phases = trace;
    return out;
}
}  // namespace

const char* phase_name(Phase p) noexcept
{
    switch (p) {
        case Phase::init: return "init";
        case Phase::attesting: return "attesting";
        case Phase::negotiated: return "negotiated";
        case Phase::submitted: return "submitted";
        case Phase::done: return "done";
        case Phase::aborted: return "aborted";
    }
    return "?";
}

ProviderOutcome provider_run(Stream& stream, BytesView rot_pub, BytesView x_code,
    BytesView b_config, BytesView p_props, BytesView source, BytesView executable,
    const std::optional<crypto::KeyPair>& a_key, crypto::RandomSource& rng, SessionTrace* trace)
{
    SessionTrace local;
    SessionTrace& tr = trace ? *trace : local;
    try {
        return provider_session(stream, rot_pub, x_code, b_config, p_props, source, executable,
            a_key, rng, tr.phases);
    } catch (const DecodeError& e) {
        enter(tr.phases, Phase::aborted);
        throw ProviderError{ProviderError::Kind::NegotiationFailed,
                            std::string{"malformed payload: "} + e.what()};
    } catch (...) {
        enter(tr.phases, Phase::aborted);
        throw;
    }
}

ConsumerOutcome consumer_serve(Stream& stream, tee::Platform& platform, uint64_t ic_id,
    BytesView rot_pub, BytesView x_code, BytesView b_config, BytesView p_props,
    const std::optional<Bytes>& a_pub, SessionTrace* trace)
{
    SessionTrace local;
    SessionTrace& tr = trace ? *trace : local;
    try {
        return consumer_session(stream, platform, ic_id, rot_pub, x_code, b_config, p_props,
            a_pub, tr.phases);
    } catch (...) {
        enter(tr.phases, Phase::aborted);
        throw;
    }
}

certs::VerifyOutcome consumer_verify(const certs::CertificateChain& chain, BytesView rot_pub,
    BytesView x_code, BytesView b_config, BytesView p_props, const std::optional<Bytes>& a_pub)
{
    crypto::Measurement m_exp = crypto::measure(x_code, b_config, p_props);
    return certs::verify_chain(chain, rot_pub, m_exp, /*require_all_valid=*/true, a_pub);
}

}  // namespace tcpa::protocol
