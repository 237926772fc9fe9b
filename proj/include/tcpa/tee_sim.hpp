// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tcpa/certs.hpp"
#include "tcpa/protocol/message.hpp"
#include "tcpa/symexec/symexec.hpp"

#include <map>
#include <memory>

// Simulated TEE.
//
// A Manufacturer holds the root-of-trust key and provisions Platforms;
// a Platform hosts isolated computations (ICs). The isolation boundary
// is enforced structurally: the host talks to an IC only through
// ic_handle_message, one protocol message at a time, and nothing in the
// host-facing API exposes the IC's private key, the session key T, or a
// decrypted submission. What the host can see is exactly what a real
// untrusted host would: the certificates and the protocol frames.

namespace tcpa::tee
{
struct TeeError : std::runtime_error
{
    enum class Kind
    {
        EmptyImage,  // load_ic given an empty X, B or P image
        BadImage,    // analyzer image fails to parse
        UnknownIc,
    };

    TeeError(Kind k, const std::string& msg) : std::runtime_error{msg}, kind{k} {}

    Kind kind;
};

/// Canonical analyzer image, the X in m_IC = measure(X, B, P). It names
/// the analysis framework revision and fixes the exploration bounds, so
/// the measurement pins analysis behaviour rather than code bytes alone.
Bytes make_analyzer_image(const symexec::ExploreBounds& bounds);
/// Inverse; throws TeeError{BadImage} on any deviation from the
/// canonical form.
symexec::ExploreBounds parse_analyzer_image(BytesView x_code);

/// Host-visible lifecycle of an isolated computation. Once aborted an
/// IC only ever answers with protocol-violation errors.
enum class IcPhase : uint8_t
{
    loaded = 0,
    negotiated = 1,
    done = 2,
    aborted = 3,
};

const char* ic_phase_name(IcPhase p) noexcept;

class Platform;

/// Holds RoT_priv. The key never leaves: there is no getter and no
/// serialization path for it, only the public half and the ability to
/// provision platforms.
class Manufacturer
{
public:
    explicit Manufacturer(crypto::RandomSource& rng);

    BytesView rot_pub() const noexcept { return m_rot.public_key; }

    /// Generates a platform key pair and endorses it with a PC.
    Platform setup_platform(crypto::RandomSource& rng);

private:
    crypto::KeyPair m_rot;
};

class Platform
{
public:
    Platform(Platform&&) = default;
    Platform& operator=(Platform&&) = default;

    const certs::PlatformCertificate& pc() const noexcept { return m_pc; }
    BytesView plat_pub() const noexcept { return m_plat.public_key; }

    /// Measures (X, B, P), creates the IC key pair inside the boundary
    /// and endorses it with an ICC signed by Plat_priv. Throws
    /// TeeError{EmptyImage} if any image is empty.
    ///
    /// All IC-internal randomness is a deterministic stream seeded from
    /// 32 bytes drawn from `rng` as the first and only draw; the IC key
    /// pair is the first value generated from that stream. This fixed
    /// derivation keeps runs reproducible under a seeded source.
    std::pair<uint64_t, certs::IcCertificate> load_ic(BytesView x_code, BytesView b_config,
        BytesView p_props, crypto::RandomSource& rng);

    const certs::IcCertificate& ic_certificate(uint64_t ic_id) const;
    IcPhase ic_phase(uint64_t ic_id) const;

    /// Delivers one message across the isolation boundary and returns the
    /// IC's responses. The IC accepts KeyShare while loaded and SubmitJob
    /// once negotiated; anything else (or a malformed payload) aborts it
    /// with an Error frame. Decryption failure of a submitted S_T answers
    /// DecryptFailed; a source that does not assemble answers BuildFailed;
    /// analysis setup failures answer AnalysisFailed. Error texts are
    /// fixed strings so no submission-derived data can leak through them.
    std::vector<protocol::ProtocolMessage> ic_handle_message(uint64_t ic_id,
        const protocol::ProtocolMessage& msg);

private:
    friend class Manufacturer;

    struct Ic;

    Platform(crypto::KeyPair plat, certs::PlatformCertificate pc);

    Ic& find(uint64_t ic_id);
    const Ic& find(uint64_t ic_id) const;

    crypto::KeyPair m_plat;
    certs::PlatformCertificate m_pc;
    uint64_t m_next_id = 1;
    std::map<uint64_t, std::unique_ptr<Ic>> m_ics;
};

}  // namespace tcpa::tee
