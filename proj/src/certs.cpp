// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/certs.hpp>

namespace tcpa::certs
{
namespace
{
constexpr char MAGIC[4] = {'T', 'C', 'P', 'C'};
constexpr uint8_t VERSION = 1;

enum : uint8_t
{
    KIND_PC = 1,
    KIND_ICC = 2,
    KIND_CC = 3,
    KIND_OC = 4,
};

Bytes digest_field(const crypto::Digest& d)
{
    return Bytes(d.begin(), d.end());
}

crypto::Digest digest_from(const Bytes& b, const char* what)
{
    if (b.size() != crypto::DIGEST_SIZE)
        throw CertError{CertError::Kind::MalformedCertificate,
            std::string{what} + ": digest field must be 32 bytes"};
    crypto::Digest d{};
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

Bytes signed_encode(uint8_t kind, const Bytes& body, const Bytes& signature)
{
    ByteWriter w;
    w.put_bytes(BytesView{reinterpret_cast<const uint8_t*>(MAGIC), 4});
    w.put_u8(VERSION);
    w.put_u8(kind);
    w.put_bytes(body);
    w.put_field(signature);
    return w.take();
}

/// Strips and validates the header, returning a reader over body+signature.
ByteReader open_cert(BytesView bytes, uint8_t want_kind, const char* what)
{
    try
    {
        ByteReader r{bytes};
        const Bytes magic = r.raw(4);
        if (!std::equal(magic.begin(), magic.end(), MAGIC))
            throw DecodeError{"bad certificate magic"};
        if (r.u8() != VERSION)
            throw DecodeError{"unsupported certificate version"};
        if (r.u8() != want_kind)
            throw DecodeError{"certificate kind mismatch"};
        return r;
    }
    catch (const DecodeError& e)
    {
        throw CertError{CertError::Kind::MalformedCertificate,
            std::string{what} + ": " + e.what()};
    }
}

Bytes read_signature(ByteReader& r, const char* what)
{
    Bytes sig = r.field();
    r.expect_done();
    if (sig.size() != crypto::SIGNATURE_SIZE)
        throw CertError{CertError::Kind::MalformedCertificate,
            std::string{what} + ": signature must be 64 bytes"};
    return sig;
}

}  // namespace

Bytes pc_body(const PlatformCertificate& c)
{
    ByteWriter w;
    w.put_field(c.plat_pub);
    return w.take();
}

Bytes icc_body(const IcCertificate& c)
{
    ByteWriter w;
    w.put_field(digest_field(c.m_ic.digest));
    w.put_field(c.ic_pub);
    return w.take();
}

Bytes cc_body(const ComplianceCertificate& c)
{
    ByteWriter w;
    w.put_field(digest_field(c.h_s));
    const Bytes mode{static_cast<uint8_t>(c.digest_only ? 1 : 0)};
    w.put_field(mode);
    w.put_field(c.e);
    w.put_field(symexec::encode_report(c.report));
    return w.take();
}

Bytes oc_body(const OriginCertificate& c)
{
    ByteWriter w;
    w.put_field(digest_field(c.h_s));
    w.put_field(digest_field(c.e_digest));
    return w.take();
}

crypto::Digest ComplianceCertificate::executable_digest() const
{
    if (!digest_only)
        return crypto::hash(e);
    crypto::Digest d{};
    if (e.size() != crypto::DIGEST_SIZE)
        throw CertError{CertError::Kind::MalformedCertificate,
            "digest-only certificate does not hold a 32-byte digest"};
    std::copy(e.begin(), e.end(), d.begin());
    return d;
}

PlatformCertificate issue_pc(BytesView plat_pub, const crypto::KeyPair& rot_key)
{
    PlatformCertificate c;
    c.plat_pub.assign(plat_pub.begin(), plat_pub.end());
    c.signature = crypto::sign(pc_body(c), rot_key);
    return c;
}

IcCertificate issue_icc(const crypto::Measurement& m_ic, BytesView ic_pub,
    const crypto::KeyPair& plat_key)
{
    IcCertificate c;
    c.m_ic = m_ic;
    c.ic_pub.assign(ic_pub.begin(), ic_pub.end());
    c.signature = crypto::sign(icc_body(c), plat_key);
    return c;
}

ComplianceCertificate issue_cc(const crypto::Digest& h_s, BytesView executable,
    const symexec::AnalysisReport& report, const crypto::KeyPair& ic_key,
    bool digest_only)
{
    ComplianceCertificate c;
    c.h_s = h_s;
    c.digest_only = digest_only;
    if (digest_only)
    {
        const crypto::Digest d = crypto::hash(executable);
        c.e.assign(d.begin(), d.end());
    }
    else
    {
        c.e.assign(executable.begin(), executable.end());
    }
    c.report = report;
    c.signature = crypto::sign(cc_body(c), ic_key);
    return c;
}

OriginCertificate issue_oc(const crypto::Digest& h_s, const crypto::Digest& e_digest,
    const crypto::KeyPair& a_key)
{
    OriginCertificate c;
    c.h_s = h_s;
    c.e_digest = e_digest;
    c.signature = crypto::sign(oc_body(c), a_key);
    return c;
}

bool verify_pc(const PlatformCertificate& c, BytesView rot_pub)
{
    return crypto::verify(c.signature, pc_body(c), rot_pub);
}

bool verify_icc(const IcCertificate& c, BytesView plat_pub)
{
    return crypto::verify(c.signature, icc_body(c), plat_pub);
}

bool verify_cc(const ComplianceCertificate& c, BytesView ic_pub)
{
    return crypto::verify(c.signature, cc_body(c), ic_pub);
}

bool verify_oc(const OriginCertificate& c, BytesView a_pub)
{
    return crypto::verify(c.signature, oc_body(c), a_pub);
}

Bytes encode_pc(const PlatformCertificate& c)
{
    return signed_encode(KIND_PC, pc_body(c), c.signature);
}

Bytes encode_icc(const IcCertificate& c)
{
    return signed_encode(KIND_ICC, icc_body(c), c.signature);
}

Bytes encode_cc(const ComplianceCertificate& c)
{
    return signed_encode(KIND_CC, cc_body(c), c.signature);
}

Bytes encode_oc(const OriginCertificate& c)
{
    return signed_encode(KIND_OC, oc_body(c), c.signature);
}

PlatformCertificate decode_pc(BytesView bytes)
{
    ByteReader r = open_cert(bytes, KIND_PC, "pc");
    try
    {
        PlatformCertificate c;
        c.plat_pub = r.field();
        c.signature = read_signature(r, "pc");
        return c;
    }
    catch (const DecodeError& e)
    {
        throw CertError{CertError::Kind::MalformedCertificate,
            std::string{"pc: "} + e.what()};
    }
}

IcCertificate decode_icc(BytesView bytes)
{
    ByteReader r = open_cert(bytes, KIND_ICC, "icc");
    try
    {
        IcCertificate c;
        c.m_ic.digest = digest_from(r.field(), "icc");
        c.ic_pub = r.field();
        c.signature = read_signature(r, "icc");
        return c;
    }
    catch (const DecodeError& e)
    {
        throw CertError{CertError::Kind::MalformedCertificate,
            std::string{"icc: "} + e.what()};
    }
}

ComplianceCertificate decode_cc(BytesView bytes)
{
    ByteReader r = open_cert(bytes, KIND_CC, "cc");
    try
    {
        ComplianceCertificate c;
        c.h_s = digest_from(r.field(), "cc");
        const Bytes mode = r.field();
        if (mode.size() != 1 || mode[0] > 1)
            throw DecodeError{"bad mode field"};
        c.digest_only = mode[0] == 1;
        c.e = r.field();
        if (c.digest_only && c.e.size() != crypto::DIGEST_SIZE)
            throw DecodeError{"digest-only executable field must be 32 bytes"};
        c.report = symexec::decode_report(r.field());
        c.signature = read_signature(r, "cc");
        return c;
    }
    catch (const DecodeError& e)
    {
        throw CertError{CertError::Kind::MalformedCertificate,
            std::string{"cc: "} + e.what()};
    }
    catch (const symexec::ReportError& e)
    {
        throw CertError{CertError::Kind::MalformedCertificate,
            std::string{"cc report: "} + e.what()};
    }
}

OriginCertificate decode_oc(BytesView bytes)
{
    ByteReader r = open_cert(bytes, KIND_OC, "oc");
    try
    {
        OriginCertificate c;
        c.h_s = digest_from(r.field(), "oc");
        c.e_digest = digest_from(r.field(), "oc");
        c.signature = read_signature(r, "oc");
        return c;
    }
    catch (const DecodeError& e)
    {
        throw CertError{CertError::Kind::MalformedCertificate,
            std::string{"oc: "} + e.what()};
    }
}

const char* verify_step_name(VerifyStep s) noexcept
{
    switch (s)
    {
    case VerifyStep::pc_signature: return "pc_signature";
    case VerifyStep::icc_signature: return "icc_signature";
    case VerifyStep::measurement: return "measurement";
    case VerifyStep::cc_signature: return "cc_signature";
    case VerifyStep::report: return "report";
    case VerifyStep::origin: return "origin";
    }
    return "?";
}

const char* reject_reason_name(RejectReason r) noexcept
{
    switch (r)
    {
    case RejectReason::BadSignature: return "BadSignature";
    case RejectReason::MeasurementMismatch: return "MeasurementMismatch";
    case RejectReason::ExecutableMismatch: return "ExecutableMismatch";
    case RejectReason::PropertyNotValid: return "PropertyNotValid";
    case RejectReason::DigestMismatch: return "DigestMismatch";
    case RejectReason::MissingKey: return "MissingKey";
    case RejectReason::Malformed: return "Malformed";
    }
    return "?";
}

VerifyOutcome accept()
{
    VerifyOutcome o;
    o.accepted = true;
    return o;
}

VerifyOutcome reject(VerifyStep step, RejectReason reason)
{
    VerifyOutcome o;
    o.accepted = false;
    o.step = step;
    o.reason = reason;
    return o;
}

VerifyOutcome verify_attestation(const PlatformCertificate& pc, const IcCertificate& icc,
    BytesView rot_pub, const crypto::Measurement& m_exp)
{
    if (!verify_pc(pc, rot_pub))
        return reject(VerifyStep::pc_signature, RejectReason::BadSignature);
    if (!verify_icc(icc, pc.plat_pub))
        return reject(VerifyStep::icc_signature, RejectReason::BadSignature);
    if (!(icc.m_ic == m_exp))
        return reject(VerifyStep::measurement, RejectReason::MeasurementMismatch);
    return accept();
}

VerifyOutcome verify_chain(const CertificateChain& chain, BytesView rot_pub,
    const crypto::Measurement& m_exp, bool require_all_valid,
    const std::optional<Bytes>& a_pub)
{
    if (VerifyOutcome att = verify_attestation(chain.pc, chain.icc, rot_pub, m_exp);
        !att.accepted)
        return att;
    if (!verify_cc(chain.cc, chain.icc.ic_pub))
        return reject(VerifyStep::cc_signature, RejectReason::BadSignature);
    if (require_all_valid)
    {
        if (!chain.cc.report.eo)
            return reject(VerifyStep::report, RejectReason::ExecutableMismatch);
        for (const symexec::PropertyOutcome& po : chain.cc.report.property_outcomes)
            if (po.outcome != symexec::Outcome::valid)
                return reject(VerifyStep::report, RejectReason::PropertyNotValid);
    }
    if (chain.oc)
    {
        if (!a_pub)
            return reject(VerifyStep::origin, RejectReason::MissingKey);
        if (!verify_oc(*chain.oc, *a_pub))
            return reject(VerifyStep::origin, RejectReason::BadSignature);
        if (chain.oc->h_s != chain.cc.h_s ||
            chain.oc->e_digest != chain.cc.executable_digest())
            return reject(VerifyStep::origin, RejectReason::DigestMismatch);
    }
    return accept();
}

VerifyOutcome verify_chain_bytes(BytesView pc, BytesView icc, BytesView cc,
    const std::optional<Bytes>& oc, BytesView rot_pub, const crypto::Measurement& m_exp,
    bool require_all_valid, const std::optional<Bytes>& a_pub)
{
    CertificateChain chain;
    try
    {
        chain.pc = decode_pc(pc);
    }
    catch (const CertError&)
    {
        return reject(VerifyStep::pc_signature, RejectReason::Malformed);
    }
    try
    {
        chain.icc = decode_icc(icc);
    }
    catch (const CertError&)
    {
        return reject(VerifyStep::icc_signature, RejectReason::Malformed);
    }
    try
    {
        chain.cc = decode_cc(cc);
    }
    catch (const CertError&)
    {
        return reject(VerifyStep::cc_signature, RejectReason::Malformed);
    }
    if (oc)
    {
        try
        {
            chain.oc = decode_oc(*oc);
        }
        catch (const CertError&)
        {
            return reject(VerifyStep::origin, RejectReason::Malformed);
        }
    }
    return verify_chain(chain, rot_pub, m_exp, require_all_valid, a_pub);
}

}  // namespace tcpa::certs
