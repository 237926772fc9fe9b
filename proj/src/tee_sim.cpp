// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tcpa/tee_sim.hpp"

#include "tcpa/build_check.hpp"
#include "tcpa/registry.hpp"
#include "tcpa/wasm/parser.hpp"

#include <charconv>
#include <sstream>

namespace tcpa::tee
{
using protocol::ErrorCode;
using protocol::MsgType;
using protocol::ProtocolMessage;

namespace
{
constexpr char ANALYZER_NAME[] = "tcpa analyzer 1";

uint64_t parse_bound(std::istringstream& in, std::string_view key)
{
    std::string label, value;
    if (!(in >> label >> value) || label != key)
        throw TeeError{TeeError::Kind::BadImage,
                       std::string{"analyzer image: expected "} + std::string{key}};
    uint64_t out = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size() || out == 0)
        throw TeeError{TeeError::Kind::BadImage,
                       std::string{"analyzer image: bad "} + std::string{key}};
    return out;
}
}  // namespace

const char* ic_phase_name(IcPhase p) noexcept
{
    switch (p) {
        case IcPhase::loaded: return "loaded";
        case IcPhase::negotiated: return "negotiated";
        case IcPhase::done: return "done";
        case IcPhase::aborted: return "aborted";
    }
    return "?";
}

Bytes make_analyzer_image(const symexec::ExploreBounds& bounds)
{
    std::string out;
    out += ANALYZER_NAME;
    out += '\n';
    out += std::string{"spec "} + symexec::SPEC_VERSION + "\n";
    out += "max_paths " + std::to_string(bounds.max_paths) + "\n";
    out += "max_depth " + std::to_string(bounds.max_depth) + "\n";
    out += "loop_unroll " + std::to_string(bounds.loop_unroll) + "\n";
    out += "solver_ms " + std::to_string(bounds.per_path_solver_budget.max_millis) + "\n";
    out += "solver_enum " + std::to_string(bounds.per_path_solver_budget.max_enumeration) + "\n";
    return to_bytes(out);
}

symexec::ExploreBounds parse_analyzer_image(BytesView x_code)
{
    std::istringstream in{to_string(x_code)};
    std::string line;
    if (!std::getline(in, line) || line != ANALYZER_NAME)
        throw TeeError{TeeError::Kind::BadImage, "analyzer image: unknown analyzer"};
    if (!std::getline(in, line) || line != std::string{"spec "} + symexec::SPEC_VERSION)
        throw TeeError{TeeError::Kind::BadImage, "analyzer image: unsupported spec revision"};
    symexec::ExploreBounds b;
    b.max_paths = parse_bound(in, "max_paths");
    b.max_depth = parse_bound(in, "max_depth");
    b.loop_unroll = static_cast<uint32_t>(parse_bound(in, "loop_unroll"));
    b.per_path_solver_budget.max_millis = parse_bound(in, "solver_ms");
    b.per_path_solver_budget.max_enumeration = parse_bound(in, "solver_enum");
    std::string extra;
    if (in >> extra) throw TeeError{TeeError::Kind::BadImage, "analyzer image: trailing data"};
    return b;
}

// The isolated computation. Everything in here sits behind the message
// boundary; ic_handle_message is the only accessor.
struct Platform::Ic
{
    Ic(Bytes x, Bytes b, Bytes p, BytesView seed)
      : x_code{std::move(x)}, b_config{std::move(b)}, p_props{std::move(p)}, rng{seed}
    {}

    Bytes x_code;
    Bytes b_config;
    Bytes p_props;
    crypto::KeyPair key;  // IC_priv, never crosses the boundary
    certs::IcCertificate icc;
    crypto::SeededRandom rng;
    IcPhase phase = IcPhase::loaded;
    std::optional<crypto::SymKey> t;  // session key, negotiated via DH

    std::vector<ProtocolMessage> abort_with(ErrorCode code, std::string_view text);
    std::vector<ProtocolMessage> violation(const ProtocolMessage& msg);
    std::vector<ProtocolMessage> negotiate(const ProtocolMessage& msg);
    std::vector<ProtocolMessage> run_job(const ProtocolMessage& msg);
};

Manufacturer::Manufacturer(crypto::RandomSource& rng) : m_rot{crypto::keygen_sign(rng)} {}

Platform Manufacturer::setup_platform(crypto::RandomSource& rng)
{
    crypto::KeyPair plat = crypto::keygen_sign(rng);
    certs::PlatformCertificate pc = certs::issue_pc(plat.public_key, m_rot);
    return Platform{std::move(plat), std::move(pc)};
}

Platform::Platform(crypto::KeyPair plat, certs::PlatformCertificate pc)
  : m_plat{std::move(plat)}, m_pc{std::move(pc)}
{}

Platform::Ic& Platform::find(uint64_t ic_id)
{
    auto it = m_ics.find(ic_id);
    if (it == m_ics.end())
        throw TeeError{TeeError::Kind::UnknownIc, "no ic with id " + std::to_string(ic_id)};
    return *it->second;
}

const Platform::Ic& Platform::find(uint64_t ic_id) const
{
    return const_cast<Platform*>(this)->find(ic_id);
}

std::pair<uint64_t, certs::IcCertificate> Platform::load_ic(BytesView x_code, BytesView b_config,
    BytesView p_props, crypto::RandomSource& rng)
{
    if (x_code.empty() || b_config.empty() || p_props.empty())
        throw TeeError{TeeError::Kind::EmptyImage, "load_ic: empty parameter image"};

    Bytes seed = rng.bytes(32);
    auto ic = std::make_unique<Ic>(Bytes{x_code.begin(), x_code.end()},
        Bytes{b_config.begin(), b_config.end()}, Bytes{p_props.begin(), p_props.end()}, seed);
    ic->key = crypto::keygen_sign(ic->rng);
    crypto::Measurement m_ic = crypto::measure(x_code, b_config, p_props);
    ic->icc = certs::issue_icc(m_ic, ic->key.public_key, m_plat);

    uint64_t id = m_next_id++;
    certs::IcCertificate icc = ic->icc;
    m_ics.emplace(id, std::move(ic));
    return {id, std::move(icc)};
}

const certs::IcCertificate& Platform::ic_certificate(uint64_t ic_id) const
{
    return find(ic_id).icc;
}

IcPhase Platform::ic_phase(uint64_t ic_id) const
{
    return find(ic_id).phase;
}

std::vector<ProtocolMessage> Platform::Ic::abort_with(ErrorCode code, std::string_view text)
{
    if (phase != IcPhase::done) phase = IcPhase::aborted;
    return {protocol::make_error(code, text)};
}

std::vector<ProtocolMessage> Platform::Ic::violation(const ProtocolMessage& msg)
{
    std::string text = std::string{ic_phase_name(phase)} + " ic cannot accept " +
                       protocol::msg_type_name(msg.type);
    return abort_with(ErrorCode::ProtocolViolation, text);
}

std::vector<ProtocolMessage> Platform::Ic::negotiate(const ProtocolMessage& msg)
{
    protocol::KeyShare peer;
    try {
        peer = protocol::parse_key_share(msg);
    } catch (const DecodeError&) {
        return abort_with(ErrorCode::ProtocolViolation, "malformed KeyShare");
    }
    if (peer.share.size() != crypto::SHARE_SIZE)
        return abort_with(ErrorCode::ProtocolViolation, "bad share length");

    crypto::DhKeyPair dh = crypto::dh_keypair(rng);
    t = crypto::dh_shared(dh.share_priv, peer.share);
    phase = IcPhase::negotiated;

    protocol::KeyShare reply;
    reply.share = dh.share_pub;
    reply.signature = crypto::sign(reply.share, key);
    return {protocol::make_key_share(reply)};
}

// Runs the decrypted job: rebuild, compare, analyze, certify. Error
// texts are fixed strings; nothing derived from S may leave except the
// declared compliance-certificate fields.
std::vector<ProtocolMessage> Platform::Ic::run_job(const ProtocolMessage& msg)
{
    protocol::SubmitJob job;
    try {
        job = protocol::parse_submit_job(msg);
    } catch (const DecodeError&) {
        return abort_with(ErrorCode::ProtocolViolation, "malformed SubmitJob");
    }

    Bytes source;
    try {
        source = crypto::sym_decrypt(*t, job.s_t);
    } catch (const crypto::CryptoError&) {
        return abort_with(ErrorCode::DecryptFailed, "submission does not authenticate");
    }

    symexec::ExploreBounds bounds;
    try {
        bounds = parse_analyzer_image(x_code);
    } catch (const TeeError&) {
        return abort_with(ErrorCode::AnalysisFailed, "analyzer image does not parse");
    }

    build_check::BuilderConfig builder;
    try {
        builder = build_check::BuilderConfig::deserialize(b_config);
    } catch (const DecodeError&) {
        return abort_with(ErrorCode::BuildFailed, "builder config does not parse");
    }

    build_check::BuildResult built;
    try {
        built = build_check::build_executable(builder, to_string(source));
    } catch (const build_check::BuildFailed&) {
        return abort_with(ErrorCode::BuildFailed, "source does not assemble");
    }

    symexec::PropertySet props;
    try {
        props = decode_property_set(p_props);
    } catch (const RegistryError&) {
        return abort_with(ErrorCode::AnalysisFailed, "property image does not parse");
    }

    symexec::AnalysisReport report;
    try {
        wasm::Module mod = wasm::parse_module(built.executable);
        symexec::Analysis analysis = symexec::init_analysis(mod, built.map, props);
        report = symexec::explore(analysis, bounds);
    } catch (const std::exception&) {
        return abort_with(ErrorCode::AnalysisFailed, "analysis failed");
    }
    report.eo = build_check::compare_executables(job.e, built.executable);

    certs::ComplianceCertificate cc = certs::issue_cc(crypto::hash(source), job.e, report, key);
    phase = IcPhase::done;
    return {protocol::make_compliance_result({certs::encode_cc(cc)})};
}

std::vector<ProtocolMessage> Platform::ic_handle_message(uint64_t ic_id,
    const ProtocolMessage& msg)
{
    Ic& ic = find(ic_id);
    switch (ic.phase) {
        case IcPhase::loaded:
            if (msg.type == MsgType::KeyShare) return ic.negotiate(msg);
            return ic.violation(msg);
        case IcPhase::negotiated:
            if (msg.type == MsgType::SubmitJob) return ic.run_job(msg);
            return ic.violation(msg);
        case IcPhase::done:
        case IcPhase::aborted:
            return ic.violation(msg);
    }
    return ic.violation(msg);
}

}  // namespace tcpa::tee
