// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/build_check.hpp>
#include <tcpa/certs.hpp>
#include <tcpa/crypto.hpp>

#include <doctest.h>

using namespace tcpa;
using namespace tcpa::certs;

namespace
{
struct Actors
{
    crypto::SeededRandom rng{0xC0FFEE};
    crypto::KeyPair rot = crypto::keygen_sign(rng);
    crypto::KeyPair plat = crypto::keygen_sign(rng);
    crypto::KeyPair ic = crypto::keygen_sign(rng);
    crypto::KeyPair alice = crypto::keygen_sign(rng);
};

symexec::AnalysisReport sample_report(bool eo, symexec::Outcome outcome)
{
    symexec::AnalysisReport r;
    r.eo = eo;
    symexec::PropertyOutcome po;
    po.id = "p0";
    po.kind = symexec::PropertyKind::assertion_unreachable;
    po.outcome = outcome;
    if (outcome == symexec::Outcome::violated)
    {
        symexec::Witness w;
        w.model["a0"] = 9;
        w.line = 3;
        w.col = 7;
        po.witness = w;
    }
    r.property_outcomes.push_back(std::move(po));
    r.stats.paths = 4;
    return r;
}

CertificateChain honest_chain(Actors& a, const Bytes& source, const Bytes& b_config,
    const Bytes& props, const Bytes& executable, const symexec::AnalysisReport& report)
{
    CertificateChain chain;
    chain.pc = issue_pc(a.plat.public_key, a.rot);
    chain.icc = issue_icc(crypto::measure(source, b_config, props), a.ic.public_key, a.plat);
    chain.cc = issue_cc(crypto::hash(source), executable, report, a.ic);
    chain.oc = issue_oc(crypto::hash(source), crypto::hash(executable), a.alice);
    return chain;
}

}  // namespace

TEST_CASE("each certificate verifies after issuance")
{
    Actors a;
    const Bytes exe = to_bytes("executable-bytes");

    const PlatformCertificate pc = issue_pc(a.plat.public_key, a.rot);
    CHECK(verify_pc(pc, a.rot.public_key));
    CHECK_FALSE(verify_pc(pc, a.plat.public_key));

    const crypto::Measurement m = crypto::measure(exe, exe, exe);
    const IcCertificate icc = issue_icc(m, a.ic.public_key, a.plat);
    CHECK(verify_icc(icc, a.plat.public_key));
    CHECK_FALSE(verify_icc(icc, a.rot.public_key));

    ComplianceCertificate cc =
        issue_cc(crypto::hash(exe), exe, sample_report(true, symexec::Outcome::valid), a.ic);
    CHECK(verify_cc(cc, a.ic.public_key));

    // One changed report field breaks the compliance signature.
    cc.report.eo = false;
    CHECK_FALSE(verify_cc(cc, a.ic.public_key));

    const OriginCertificate oc = issue_oc(crypto::hash(exe), crypto::hash(exe), a.alice);
    CHECK(verify_oc(oc, a.alice.public_key));
    CHECK_FALSE(verify_oc(oc, a.ic.public_key));
}

TEST_CASE("honest chains are accepted end to end")
{
    Actors a;
    const Bytes source = to_bytes("(module)\n");
    const Bytes b_config = build_check::BuilderConfig{}.serialize();
    const Bytes props = to_bytes("property p0 assertion_unreachable\n");
    const Bytes exe = {0x00, 0x61, 0x73, 0x6D, 0x23, 0x23, 0x23, 0x23};

    const CertificateChain chain = honest_chain(a, source, b_config, props, exe,
        sample_report(true, symexec::Outcome::valid));
    const crypto::Measurement m_exp = crypto::measure(source, b_config, props);

    const VerifyOutcome v =
        verify_chain(chain, a.rot.public_key, m_exp, true, a.alice.public_key);
    CHECK(v.accepted);

    // Without the origin certificate the chain stands on its own.
    CertificateChain no_oc = chain;
    no_oc.oc.reset();
    CHECK(verify_chain(no_oc, a.rot.public_key, m_exp, true).accepted);
}

TEST_CASE("verification rejects at the first failing stage")
{
    Actors a;
    const Bytes source = to_bytes("(module)\n");
    const Bytes b_config = build_check::BuilderConfig{}.serialize();
    const Bytes props = to_bytes("props\n");
    const Bytes exe = to_bytes("exe");
    const crypto::Measurement m_exp = crypto::measure(source, b_config, props);

    const CertificateChain chain = honest_chain(a, source, b_config, props, exe,
        sample_report(true, symexec::Outcome::valid));

    SUBCASE("wrong root of trust")
    {
        const VerifyOutcome v =
            verify_chain(chain, a.alice.public_key, m_exp, true, a.alice.public_key);
        CHECK(v == reject(VerifyStep::pc_signature, RejectReason::BadSignature));
    }
    SUBCASE("icc signed by a non-platform key")
    {
        CertificateChain bad = chain;
        bad.icc = issue_icc(bad.icc.m_ic, a.ic.public_key, a.ic);
        const VerifyOutcome v =
            verify_chain(bad, a.rot.public_key, m_exp, true, a.alice.public_key);
        CHECK(v == reject(VerifyStep::icc_signature, RejectReason::BadSignature));
    }
    SUBCASE("measurement mismatch")
    {
        const crypto::Measurement other = crypto::measure(source, b_config, to_bytes("x"));
        const VerifyOutcome v =
            verify_chain(chain, a.rot.public_key, other, true, a.alice.public_key);
        CHECK(v == reject(VerifyStep::measurement, RejectReason::MeasurementMismatch));
    }
    SUBCASE("cc signed by the wrong computation key")
    {
        CertificateChain bad = chain;
        bad.cc = issue_cc(bad.cc.h_s, exe, bad.cc.report, a.plat);
        const VerifyOutcome v =
            verify_chain(bad, a.rot.public_key, m_exp, true, a.alice.public_key);
        CHECK(v == reject(VerifyStep::cc_signature, RejectReason::BadSignature));
    }
    SUBCASE("executable equality outcome false")
    {
        CertificateChain bad = chain;
        bad.cc = issue_cc(bad.cc.h_s, exe, sample_report(false, symexec::Outcome::valid),
            a.ic);
        const VerifyOutcome v =
            verify_chain(bad, a.rot.public_key, m_exp, true, a.alice.public_key);
        CHECK(v == reject(VerifyStep::report, RejectReason::ExecutableMismatch));
    }
    SUBCASE("unknown property outcome under require_all_valid")
    {
        CertificateChain bad = chain;
        bad.cc = issue_cc(bad.cc.h_s, exe, sample_report(true, symexec::Outcome::unknown),
            a.ic);
        const VerifyOutcome v =
            verify_chain(bad, a.rot.public_key, m_exp, true, a.alice.public_key);
        CHECK(v == reject(VerifyStep::report, RejectReason::PropertyNotValid));

        // Without the strict flag the same chain passes.
        CHECK(verify_chain(bad, a.rot.public_key, m_exp, false, a.alice.public_key)
                  .accepted);
    }
    SUBCASE("origin certificate over different digests")
    {
        CertificateChain bad = chain;
        bad.oc = issue_oc(crypto::hash(to_bytes("other")), crypto::hash(exe), a.alice);
        const VerifyOutcome v =
            verify_chain(bad, a.rot.public_key, m_exp, true, a.alice.public_key);
        CHECK(v == reject(VerifyStep::origin, RejectReason::DigestMismatch));
    }
    SUBCASE("origin certificate without a provider key")
    {
        const VerifyOutcome v = verify_chain(chain, a.rot.public_key, m_exp, true);
        CHECK(v == reject(VerifyStep::origin, RejectReason::MissingKey));
    }
}

TEST_CASE("certificate encodings are canonical")
{
    Actors a;
    const Bytes exe = to_bytes("some executable");
    const PlatformCertificate pc = issue_pc(a.plat.public_key, a.rot);
    const IcCertificate icc =
        issue_icc(crypto::measure(exe, exe, exe), a.ic.public_key, a.plat);
    const ComplianceCertificate cc = issue_cc(crypto::hash(exe), exe,
        sample_report(true, symexec::Outcome::violated), a.ic);
    const OriginCertificate oc = issue_oc(crypto::hash(exe), crypto::hash(exe), a.alice);

    const Bytes pcb = encode_pc(pc);
    CHECK(encode_pc(decode_pc(pcb)) == pcb);
    CHECK(decode_pc(pcb) == pc);

    const Bytes iccb = encode_icc(icc);
    CHECK(encode_icc(decode_icc(iccb)) == iccb);
    CHECK(decode_icc(iccb) == icc);

    const Bytes ccb = encode_cc(cc);
    CHECK(encode_cc(decode_cc(ccb)) == ccb);
    CHECK(decode_cc(ccb) == cc);

    const Bytes ocb = encode_oc(oc);
    CHECK(encode_oc(decode_oc(ocb)) == ocb);
    CHECK(decode_oc(ocb) == oc);

    // Kind confusion is malformed, as is truncation.
    CHECK_THROWS_AS(static_cast<void>(decode_icc(pcb)), CertError);
    CHECK_THROWS_AS(
        static_cast<void>(decode_pc(Bytes(pcb.begin(), pcb.end() - 1))), CertError);

    // Digest-only mode carries the hash instead of the bytes.
    const ComplianceCertificate slim = issue_cc(crypto::hash(exe), exe,
        sample_report(true, symexec::Outcome::valid), a.ic, true);
    CHECK(slim.digest_only);
    CHECK(slim.e.size() == crypto::DIGEST_SIZE);
    CHECK(slim.executable_digest() == crypto::hash(exe));
    CHECK(verify_cc(slim, a.ic.public_key));
    const Bytes slimb = encode_cc(slim);
    CHECK(encode_cc(decode_cc(slimb)) == slimb);
}

TEST_CASE("flipping any byte of any certificate rejects at its owning stage")
{
    Actors a;
    const Bytes source = to_bytes("(module)\n");
    const Bytes b_config = build_check::BuilderConfig{}.serialize();
    const Bytes props = to_bytes("props\n");
    const Bytes exe = to_bytes("tiny-executable");
    const crypto::Measurement m_exp = crypto::measure(source, b_config, props);
    const CertificateChain chain = honest_chain(a, source, b_config, props, exe,
        sample_report(true, symexec::Outcome::valid));

    const Bytes pcb = encode_pc(chain.pc);
    const Bytes iccb = encode_icc(chain.icc);
    const Bytes ccb = encode_cc(chain.cc);
    const Bytes ocb = encode_oc(*chain.oc);

    REQUIRE(verify_chain_bytes(pcb, iccb, ccb, ocb, a.rot.public_key, m_exp, true,
        a.alice.public_key)
                .accepted);

    struct Target
    {
        const Bytes* bytes;
        VerifyStep step;
    };
    const Target targets[] = {
        {&pcb, VerifyStep::pc_signature},
        {&iccb, VerifyStep::icc_signature},
        {&ccb, VerifyStep::cc_signature},
        {&ocb, VerifyStep::origin},
    };

    for (const Target& t : targets)
    {
        for (size_t pos = 0; pos < t.bytes->size(); ++pos)
        {
            Bytes mutated = *t.bytes;
            mutated[pos] ^= 0x01;
            const VerifyOutcome v = verify_chain_bytes(t.bytes == &pcb ? mutated : pcb,
                t.bytes == &iccb ? mutated : iccb, t.bytes == &ccb ? mutated : ccb,
                t.bytes == &ocb ? mutated : ocb, a.rot.public_key, m_exp, true,
                a.alice.public_key);
            REQUIRE_FALSE(v.accepted);
            REQUIRE_MESSAGE(v.step == t.step, "stage ", verify_step_name(v.step),
                " for byte ", pos, " of ", verify_step_name(t.step), " certificate");
        }
    }
}

TEST_CASE("builder output is deterministic")
{
    const build_check::BuilderConfig b;
    const char* src = R"((module
      (func (export "f") (param $x i32) (result i32)
        local.get $x
        i32.const 2
        i32.mul
      )
    ))";
    const build_check::BuildResult r1 = build_check::build_executable(b, src);
    const build_check::BuildResult r2 = build_check::build_executable(b, src);
    CHECK(r1.executable == r2.executable);
    CHECK(r1.map == r2.map);
    CHECK(build_check::compare_executables(r1.executable, r2.executable));
    CHECK(crypto::hash(r1.executable) == crypto::hash(r2.executable));
}

TEST_CASE("build failures carry the source position")
{
    const build_check::BuilderConfig b;
    try
    {
        static_cast<void>(build_check::build_executable(b, "(module\n  (func (oops"));
        FAIL("expected BuildFailed");
    }
    catch (const build_check::BuildFailed& e)
    {
        CHECK(e.line >= 2);
        CHECK(e.col >= 1);
    }
}

TEST_CASE("an empty module builds to the bare wasm header")
{
    const build_check::BuildResult r =
        build_check::build_executable(build_check::BuilderConfig{}, "(module)");
    const Bytes expected = {0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00};
    CHECK(r.executable == expected);
}

TEST_CASE("executable comparison is exact")
{
    const Bytes e1 = to_bytes("abcdef");
    Bytes e2 = e1;
    CHECK(build_check::compare_executables(e1, e2));
    e2[3] ^= 0x20;
    CHECK_FALSE(build_check::compare_executables(e1, e2));
    CHECK_FALSE(build_check::compare_executables(e1, to_bytes("abcde")));
}

TEST_CASE("builder configuration serializes to stable bytes")
{
    const build_check::BuilderConfig b;
    const Bytes s = b.serialize();
    CHECK(to_string(s) == "builder reference_assembler\ndeterministic 1\n");
    CHECK(build_check::BuilderConfig::deserialize(s) == b);

    build_check::BuilderConfig loose;
    loose.deterministic = false;
    CHECK(build_check::BuilderConfig::deserialize(loose.serialize()) == loose);
    CHECK_THROWS_AS(
        static_cast<void>(build_check::BuilderConfig::deserialize(to_bytes("builder gcc\n"))),
        DecodeError);
}
