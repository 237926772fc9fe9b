// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tcpa/bytes.hpp"

#include <array>
#include <memory>

// Simulation-grade cryptography for the TCPA protocol actors.
//
// Primitives: SHA-256 hashing, Ed25519 signatures, X25519 key agreement
// (with a hashing KDF) and ChaCha20-Poly1305 authenticated encryption,
// all backed by libsodium. Keys are ordinary process memory: this module
// simulates TEE-protected keys and is NOT hardened for production use
// (no hardware sealing, no side-channel guarantees).

namespace tcpa::crypto
{
struct CryptoError : std::runtime_error
{
    enum class Kind
    {
        MalformedKey,
        MalformedSignature,
        MalformedShare,
        AuthFailure,
        BadKeyLength,
    };

    CryptoError(Kind k, const std::string& msg) : std::runtime_error{msg}, kind{k} {}

    Kind kind;
};

/// Injected randomness source. `SystemRandom` draws from the OS;
/// `SeededRandom` produces a deterministic ChaCha20 stream for
/// reproducible test and benchmark runs (TCPA_SEED).
class RandomSource
{
public:
    virtual ~RandomSource() = default;
    virtual void fill(uint8_t* out, size_t n) = 0;

    Bytes bytes(size_t n)
    {
        Bytes b(n);
        fill(b.data(), n);
        return b;
    }
};

class SystemRandom final : public RandomSource
{
public:
    void fill(uint8_t* out, size_t n) override;
};

class SeededRandom final : public RandomSource
{
public:
    explicit SeededRandom(uint64_t seed);
    explicit SeededRandom(BytesView seed);

    void fill(uint8_t* out, size_t n) override;

private:
    std::array<uint8_t, 32> m_key;
    uint64_t m_counter = 0;
    std::array<uint8_t, 64> m_block{};
    size_t m_avail = 0;
};

constexpr size_t DIGEST_SIZE = 32;
constexpr size_t SIGNATURE_SIZE = 64;
constexpr size_t SHARE_SIZE = 32;
constexpr size_t SYM_KEY_SIZE = 32;

using Digest = std::array<uint8_t, DIGEST_SIZE>;
using SymKey = std::array<uint8_t, SYM_KEY_SIZE>;

/// Signature-scheme key pair (Ed25519).
struct KeyPair
{
    Bytes public_key;
    Bytes private_key;
    std::string scheme = "ed25519";
};

/// Measurement of an isolated computation's images. Produced only by
/// measure(); compared byte-for-byte during attestation.
struct Measurement
{
    Digest digest{};

    bool operator==(const Measurement&) const = default;
};

Digest hash(BytesView data);

KeyPair keygen_sign(RandomSource& rng);
Bytes sign(BytesView message, const KeyPair& key);
bool verify(BytesView signature, BytesView message, BytesView public_key);

/// X25519 share pair for negotiating the symmetric session key T.
struct DhKeyPair
{
    Bytes share_pub;
    Bytes share_priv;
};

DhKeyPair dh_keypair(RandomSource& rng);
/// Derives the 32-byte session key T; both sides obtain the same value.
/// The raw curve point is run through a hashing KDF before use.
SymKey dh_shared(BytesView share_priv, BytesView peer_pub);

/// Authenticated encryption (ChaCha20-Poly1305, IETF). A fresh random
/// nonce is drawn per call and carried in the envelope:
/// nonce(12) || ciphertext+tag.
Bytes sym_encrypt(const SymKey& key, BytesView plaintext, RandomSource& rng);
Bytes sym_decrypt(const SymKey& key, BytesView envelope);

/// Measurement over the isolated computation's parameter images:
/// SHA-256 of len(X)||X||len(B)||B||len(P)||P with 4-byte big-endian
/// length prefixes, so any party holding the images can recompute it.
Measurement measure(BytesView x_code, BytesView b_config, BytesView p_props);

}  // namespace tcpa::crypto
