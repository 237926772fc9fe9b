// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/crypto.hpp>

#include <doctest.h>

#include <set>

using namespace tcpa;
using namespace tcpa::crypto;

namespace
{
Bytes digest_bytes(const Digest& d)
{
    return Bytes(d.begin(), d.end());
}

/// Deterministic source that replays a fixed byte pattern; used to pin
/// key material in vector tests.
class FixedRandom final : public RandomSource
{
public:
    explicit FixedRandom(Bytes pattern) : m_pattern{std::move(pattern)} {}

    void fill(uint8_t* out, size_t n) override
    {
        for (size_t i = 0; i < n; ++i)
            out[i] = m_pattern[m_pos++ % m_pattern.size()];
    }

private:
    Bytes m_pattern;
    size_t m_pos = 0;
};

}  // namespace

TEST_CASE("sha-256 matches published vectors")
{
    CHECK(to_hex(digest_bytes(hash({}))) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(to_hex(digest_bytes(hash(to_bytes("abc")))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("ed25519 key and signature match an independent implementation")
{
    // Vectors computed with python-cryptography from the 00..1f seed.
    Bytes seed(32);
    for (size_t i = 0; i < seed.size(); ++i)
        seed[i] = static_cast<uint8_t>(i);
    FixedRandom rng{seed};
    const KeyPair kp = keygen_sign(rng);

    CHECK(to_hex(kp.public_key) ==
          "03a107bff3ce10be1d70dd18e74bc09967e4d6309ba50d5f1ddc8664125531b8");

    const Bytes msg = to_bytes("tcpa test message");
    const Bytes sig = sign(msg, kp);
    CHECK(to_hex(sig) ==
          "46e14696ed13274d59be06188acfcf3a5809d9bf8eb4b227123f84b934b63c41"
          "c04e693b5e2450a9da4b4e4b292c13919718200168e38eac43ed2a490980e704");
    CHECK(verify(sig, msg, kp.public_key));
}

TEST_CASE("signature verification rejects tampering")
{
    SeededRandom rng{7};
    const KeyPair kp = keygen_sign(rng);
    const Bytes msg = to_bytes("payload");
    Bytes sig = sign(msg, kp);

    CHECK(verify(sig, msg, kp.public_key));

    Bytes bad_sig = sig;
    bad_sig[10] ^= 0x01;
    CHECK_FALSE(verify(bad_sig, msg, kp.public_key));

    Bytes bad_msg = msg;
    bad_msg[0] ^= 0x01;
    CHECK_FALSE(verify(sig, bad_msg, kp.public_key));

    const KeyPair other = keygen_sign(rng);
    CHECK_FALSE(verify(sig, msg, other.public_key));
}

TEST_CASE("x25519 agreement matches an independent implementation")
{
    const Bytes a_priv(32, 0x11);
    const Bytes b_priv(32, 0x22);
    FixedRandom rng_a{a_priv};
    FixedRandom rng_b{b_priv};
    const DhKeyPair a = dh_keypair(rng_a);
    const DhKeyPair b = dh_keypair(rng_b);

    CHECK(to_hex(a.share_pub) ==
          "7b4e909bbe7ffe44c465a220037d608ee35897d31ef972f07f74892cb0f73f13");
    CHECK(to_hex(b.share_pub) ==
          "0faa684ed28867b97f4a6a2dee5df8ce974e76b7018e3f22a1c4cf2678570f20");

    const SymKey t_a = dh_shared(a.share_priv, b.share_pub);
    const SymKey t_b = dh_shared(b.share_priv, a.share_pub);
    CHECK(t_a == t_b);

    // T = SHA-256("tcpa/T/v1" || raw_point); the raw point is the vector
    // value, so T is pinned through the KDF definition.
    Bytes kdf_input = to_bytes("tcpa/T/v1");
    const Bytes raw = from_hex("9e004098efc091d4ec2663b4e9f5cfd4d7064571690b4bea97ab146ab9f35056");
    kdf_input.insert(kdf_input.end(), raw.begin(), raw.end());
    const Digest expected = hash(kdf_input);
    CHECK(std::equal(t_a.begin(), t_a.end(), expected.begin()));
}

TEST_CASE("distinct dh key pairs negotiate distinct keys")
{
    SystemRandom rng;
    std::set<Bytes> pubs;
    for (int i = 0; i < 100; ++i)
        pubs.insert(dh_keypair(rng).share_pub);
    CHECK(pubs.size() == 100);
}

TEST_CASE("aead encryption matches an independent implementation")
{
    SymKey key;
    key.fill(0x42);
    Bytes nonce(12);
    for (size_t i = 0; i < nonce.size(); ++i)
        nonce[i] = static_cast<uint8_t>(i);
    FixedRandom rng{nonce};

    const Bytes envelope = sym_encrypt(key, to_bytes("attack at dawn"), rng);
    REQUIRE(envelope.size() == 12 + 14 + 16);
    CHECK(to_hex(Bytes(envelope.begin(), envelope.begin() + 12)) == to_hex(nonce));
    CHECK(to_hex(Bytes(envelope.begin() + 12, envelope.end())) ==
          "85342027f952533d1d71b9afb654d45249762dcb6c4438456c4ba4af0ff2");

    CHECK(sym_decrypt(key, envelope) == to_bytes("attack at dawn"));
}

TEST_CASE("aead roundtrip and tamper rejection")
{
    SeededRandom rng{99};
    SymKey key;
    rng.fill(key.data(), key.size());

    const Bytes pt = to_bytes("the quick brown fox");
    const Bytes envelope = sym_encrypt(key, pt, rng);
    CHECK(sym_decrypt(key, envelope) == pt);

    Bytes tampered = envelope;
    tampered.back() ^= 0x80;
    CHECK_THROWS_AS((void)sym_decrypt(key, tampered), CryptoError);

    SymKey wrong = key;
    wrong[0] ^= 1;
    CHECK_THROWS_AS((void)sym_decrypt(wrong, envelope), CryptoError);

    CHECK_THROWS_AS((void)sym_decrypt(key, Bytes{1, 2, 3}), CryptoError);
}

TEST_CASE("seeded random is reproducible and seed-sensitive")
{
    SeededRandom a{1234};
    SeededRandom b{1234};
    SeededRandom c{1235};
    const Bytes ba = a.bytes(64);
    CHECK(ba == b.bytes(64));
    CHECK(ba != c.bytes(64));

    // Chunked reads see the same stream as one big read.
    SeededRandom d{1234};
    Bytes chunked = d.bytes(10);
    const Bytes rest = d.bytes(54);
    chunked.insert(chunked.end(), rest.begin(), rest.end());
    CHECK(chunked == ba);
}

TEST_CASE("measurement is deterministic and field-boundary sensitive")
{
    const Bytes x = to_bytes("analyzer config");
    const Bytes b = to_bytes("builder config");
    const Bytes p = to_bytes("properties");

    const Measurement m1 = measure(x, b, p);
    const Measurement m2 = measure(x, b, p);
    CHECK(m1 == m2);

    CHECK_FALSE(measure(to_bytes("analyzer configb"), to_bytes("uilder config"), p) == m1);
    CHECK_FALSE(measure(x, p, b) == measure(x, b, p));
    CHECK_FALSE(measure(to_bytes("analyzer confi"), b, p) == m1);
}
