// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tcpa/bytes.hpp"
#include "tcpa/crypto.hpp"
#include "tcpa/symexec/report.hpp"

#include <optional>

// The attestation certificate chain.
//
// Four certificates tie an analysis result to a hardware root of trust:
//
//   PC  = (Plat_pub)            signed by the manufacturer root RoT_priv
//   ICC = (m_IC, IC_pub)        signed by the platform key Plat_priv
//   CC  = (h(S), E, R)          signed by the isolated computation IC_priv
//   OC  = (h(S), hash(E))       signed by the provider key A_priv
//
// Every signature covers the canonical body encoding: the declared fields
// in order, each as a 4-byte big-endian length followed by the raw bytes.
// Certificates travel as magic "TCPC" + version + kind + body + signature
// and re-encode byte-identically (encode(decode(b)) == b).

namespace tcpa::certs
{
struct CertError : std::runtime_error
{
    enum class Kind
    {
        MalformedCertificate,
        MalformedKey,
    };

    CertError(Kind k, const std::string& msg) : std::runtime_error{msg}, kind{k} {}

    Kind kind;
};

struct PlatformCertificate
{
    Bytes plat_pub;
    Bytes signature;  // by RoT_priv

    bool operator==(const PlatformCertificate&) const = default;
};

struct IcCertificate
{
    crypto::Measurement m_ic;
    Bytes ic_pub;
    Bytes signature;  // by Plat_priv

    bool operator==(const IcCertificate&) const = default;
};

struct ComplianceCertificate
{
    crypto::Digest h_s{};
    /// When set, `e` holds the 32-byte executable digest instead of the
    /// executable itself (practical mode for large E; the flag is part of
    /// the signed body).
    bool digest_only = false;
    Bytes e;
    symexec::AnalysisReport report;
    Bytes signature;  // by IC_priv

    /// Digest of the executable regardless of mode.
    crypto::Digest executable_digest() const;

    bool operator==(const ComplianceCertificate& o) const
    {
        return h_s == o.h_s && digest_only == o.digest_only && e == o.e &&
            report_equal(report, o.report) && signature == o.signature;
    }
};

struct OriginCertificate
{
    crypto::Digest h_s{};
    crypto::Digest e_digest{};
    Bytes signature;  // by A_priv

    bool operator==(const OriginCertificate&) const = default;
};

struct CertificateChain
{
    PlatformCertificate pc;
    IcCertificate icc;
    ComplianceCertificate cc;
    std::optional<OriginCertificate> oc;

    bool operator==(const CertificateChain&) const = default;
};

/// Canonical signed bodies (no signature, no file header).
Bytes pc_body(const PlatformCertificate& c);
Bytes icc_body(const IcCertificate& c);
Bytes cc_body(const ComplianceCertificate& c);
Bytes oc_body(const OriginCertificate& c);

PlatformCertificate issue_pc(BytesView plat_pub, const crypto::KeyPair& rot_key);
IcCertificate issue_icc(const crypto::Measurement& m_ic, BytesView ic_pub,
    const crypto::KeyPair& plat_key);
ComplianceCertificate issue_cc(const crypto::Digest& h_s, BytesView executable,
    const symexec::AnalysisReport& report, const crypto::KeyPair& ic_key,
    bool digest_only = false);
OriginCertificate issue_oc(const crypto::Digest& h_s, const crypto::Digest& e_digest,
    const crypto::KeyPair& a_key);

/// Per-certificate signature checks against the issuer public key.
bool verify_pc(const PlatformCertificate& c, BytesView rot_pub);
bool verify_icc(const IcCertificate& c, BytesView plat_pub);
bool verify_cc(const ComplianceCertificate& c, BytesView ic_pub);
bool verify_oc(const OriginCertificate& c, BytesView a_pub);

/// File encodings: "TCPC" + u8 version + u8 kind + body + signature field.
/// Decoders throw CertError{MalformedCertificate} and reject trailing bytes.
Bytes encode_pc(const PlatformCertificate& c);
Bytes encode_icc(const IcCertificate& c);
Bytes encode_cc(const ComplianceCertificate& c);
Bytes encode_oc(const OriginCertificate& c);
PlatformCertificate decode_pc(BytesView bytes);
IcCertificate decode_icc(BytesView bytes);
ComplianceCertificate decode_cc(BytesView bytes);
OriginCertificate decode_oc(BytesView bytes);

/// Chain verification stages, checked in this order; the first failure
/// names its stage.
enum class VerifyStep : uint8_t
{
    pc_signature = 0,
    icc_signature = 1,
    measurement = 2,
    cc_signature = 3,
    report = 4,
    origin = 5,
};

const char* verify_step_name(VerifyStep s) noexcept;

enum class RejectReason : uint8_t
{
    BadSignature = 0,
    MeasurementMismatch = 1,
    ExecutableMismatch = 2,  // report stage: eo == false
    PropertyNotValid = 3,    // report stage: an outcome is not valid
    DigestMismatch = 4,      // origin stage: OC digests disagree with CC
    MissingKey = 5,          // OC present but no A_pub supplied
    Malformed = 6,           // byte-level verification: certificate fails to decode
};

const char* reject_reason_name(RejectReason r) noexcept;

struct VerifyOutcome
{
    bool accepted = false;
    VerifyStep step = VerifyStep::pc_signature;   // meaningful when rejected
    RejectReason reason = RejectReason::BadSignature;

    bool operator==(const VerifyOutcome&) const = default;
};

VerifyOutcome accept();
VerifyOutcome reject(VerifyStep step, RejectReason reason);

/// Stages 1-3 alone (PC signature, ICC signature under the PC's platform
/// key, measurement comparison): what a provider must check before it
/// negotiates a key or submits a job.
VerifyOutcome verify_attestation(const PlatformCertificate& pc, const IcCertificate& icc,
    BytesView rot_pub, const crypto::Measurement& m_exp);

/// Verifies the chain: (1) PC signature under rot_pub; (2) ICC signature
/// under the PC's platform key; (3) m_ic == m_exp; (4) CC signature under
/// the ICC's IC key; (5) when require_all_valid, report.eo must be true
/// and every property outcome valid; (6) when an OC is present, its
/// signature under a_pub and its digests against the CC.
VerifyOutcome verify_chain(const CertificateChain& chain, BytesView rot_pub,
    const crypto::Measurement& m_exp, bool require_all_valid,
    const std::optional<Bytes>& a_pub = std::nullopt);

/// Byte-level variant for wire input: decodes each certificate in stage
/// order, treating a malformed one as rejection at the first stage that
/// covers it, then delegates to verify_chain.
VerifyOutcome verify_chain_bytes(BytesView pc, BytesView icc, BytesView cc,
    const std::optional<Bytes>& oc, BytesView rot_pub, const crypto::Measurement& m_exp,
    bool require_all_valid, const std::optional<Bytes>& a_pub = std::nullopt);

}  // namespace tcpa::certs
