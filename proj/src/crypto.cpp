// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tcpa/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>

namespace tcpa::crypto
{
namespace
{
void ensure_sodium()
{
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0)
            throw std::runtime_error{"libsodium initialization failed"};
    });
}
}  // namespace

void SystemRandom::fill(uint8_t* out, size_t n)
{
    ensure_sodium();
    randombytes_buf(out, n);
}

SeededRandom::SeededRandom(uint64_t seed)
{
    ensure_sodium();
    uint8_t buf[8];
    for (int i = 0; i < 8; ++i)
        buf[i] = static_cast<uint8_t>(seed >> (8 * i));
    crypto_hash_sha256(m_key.data(), buf, sizeof(buf));
}

SeededRandom::SeededRandom(BytesView seed)
{
    ensure_sodium();
    crypto_hash_sha256(m_key.data(), seed.data(), seed.size());
}

void SeededRandom::fill(uint8_t* out, size_t n)
{
    // ChaCha20 keystream consumed as one continuous byte stream; partial
    // blocks are buffered so chunked reads match a single large read.
    static const uint8_t nonce[crypto_stream_chacha20_NONCEBYTES] = {0};
    while (n > 0)
    {
        if (m_avail == 0)
        {
            m_block.fill(0);
            crypto_stream_chacha20_xor_ic(m_block.data(), m_block.data(), m_block.size(),
                nonce, m_counter, m_key.data());
            ++m_counter;
            m_avail = m_block.size();
        }
        const size_t take = std::min(n, m_avail);
        std::memcpy(out, m_block.data() + (m_block.size() - m_avail), take);
        out += take;
        n -= take;
        m_avail -= take;
    }
}

Digest hash(BytesView data)
{
    ensure_sodium();
    Digest d;
    crypto_hash_sha256(d.data(), data.data(), data.size());
    return d;
}

KeyPair keygen_sign(RandomSource& rng)
{
    ensure_sodium();
    uint8_t seed[crypto_sign_SEEDBYTES];
    rng.fill(seed, sizeof(seed));
    KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.private_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.private_key.data(), seed);
    sodium_memzero(seed, sizeof(seed));
    return kp;
}

Bytes sign(BytesView message, const KeyPair& key)
{
    ensure_sodium();
    if (key.private_key.size() != crypto_sign_SECRETKEYBYTES)
        throw CryptoError{CryptoError::Kind::MalformedKey, "signing key has wrong length"};
    Bytes sig(SIGNATURE_SIZE);
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
        key.private_key.data());
    return sig;
}

bool verify(BytesView signature, BytesView message, BytesView public_key)
{
    ensure_sodium();
    if (public_key.size() != crypto_sign_PUBLICKEYBYTES)
        throw CryptoError{CryptoError::Kind::MalformedKey, "public key has wrong length"};
    if (signature.size() != SIGNATURE_SIZE)
        throw CryptoError{CryptoError::Kind::MalformedSignature, "signature has wrong length"};
    return crypto_sign_verify_detached(
               signature.data(), message.data(), message.size(), public_key.data()) == 0;
}

DhKeyPair dh_keypair(RandomSource& rng)
{
    ensure_sodium();
    DhKeyPair kp;
    kp.share_priv = rng.bytes(crypto_scalarmult_SCALARBYTES);
    kp.share_pub.resize(crypto_scalarmult_BYTES);
    crypto_scalarmult_base(kp.share_pub.data(), kp.share_priv.data());
    return kp;
}

SymKey dh_shared(BytesView share_priv, BytesView peer_pub)
{
    ensure_sodium();
    if (share_priv.size() != crypto_scalarmult_SCALARBYTES)
        throw CryptoError{CryptoError::Kind::MalformedShare, "private share has wrong length"};
    if (peer_pub.size() != crypto_scalarmult_BYTES)
        throw CryptoError{CryptoError::Kind::MalformedShare, "peer share has wrong length"};

    uint8_t raw[crypto_scalarmult_BYTES];
    if (crypto_scalarmult(raw, share_priv.data(), peer_pub.data()) != 0)
        throw CryptoError{CryptoError::Kind::MalformedShare, "peer share rejected"};

    // KDF step: T = SHA-256("tcpa/T/v1" || raw point).
    static constexpr char context[] = "tcpa/T/v1";
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    crypto_hash_sha256_update(&st, reinterpret_cast<const uint8_t*>(context), sizeof(context) - 1);
    crypto_hash_sha256_update(&st, raw, sizeof(raw));
    SymKey key;
    crypto_hash_sha256_final(&st, key.data());
    sodium_memzero(raw, sizeof(raw));
    return key;
}

Bytes sym_encrypt(const SymKey& key, BytesView plaintext, RandomSource& rng)
{
    ensure_sodium();
    static_assert(SYM_KEY_SIZE == crypto_aead_chacha20poly1305_ietf_KEYBYTES);
    Bytes envelope(crypto_aead_chacha20poly1305_ietf_NPUBBYTES + plaintext.size() +
                   crypto_aead_chacha20poly1305_ietf_ABYTES);
    rng.fill(envelope.data(), crypto_aead_chacha20poly1305_ietf_NPUBBYTES);
    unsigned long long clen = 0;
    crypto_aead_chacha20poly1305_ietf_encrypt(
        envelope.data() + crypto_aead_chacha20poly1305_ietf_NPUBBYTES, &clen, plaintext.data(),
        plaintext.size(), nullptr, 0, nullptr, envelope.data(), key.data());
    envelope.resize(crypto_aead_chacha20poly1305_ietf_NPUBBYTES + clen);
    return envelope;
}

Bytes sym_decrypt(const SymKey& key, BytesView envelope)
{
    ensure_sodium();
    constexpr size_t npub = crypto_aead_chacha20poly1305_ietf_NPUBBYTES;
    constexpr size_t tag = crypto_aead_chacha20poly1305_ietf_ABYTES;
    if (envelope.size() < npub + tag)
        throw CryptoError{CryptoError::Kind::AuthFailure, "ciphertext envelope too short"};
    Bytes plaintext(envelope.size() - npub - tag);
    unsigned long long plen = 0;
    if (crypto_aead_chacha20poly1305_ietf_decrypt(plaintext.data(), &plen, nullptr,
            envelope.data() + npub, envelope.size() - npub, nullptr, 0, envelope.data(),
            key.data()) != 0)
        throw CryptoError{CryptoError::Kind::AuthFailure, "authenticated decryption failed"};
    plaintext.resize(plen);
    return plaintext;
}

Measurement measure(BytesView x_code, BytesView b_config, BytesView p_props)
{
    ByteWriter w;
    w.put_field(x_code);
    w.put_field(b_config);
    w.put_field(p_props);
    return Measurement{hash(w.bytes())};
}

}  // namespace tcpa::crypto
