// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tcpa/registry.hpp"

#include <sstream>

namespace tcpa
{
namespace
{
constexpr char SET_MAGIC[4] = {'T', 'C', 'P', 'P'};
constexpr char REG_MAGIC[4] = {'T', 'C', 'P', 'R'};
constexpr uint8_t VERSION = 1;

RegistryError malformed(const std::string& msg)
{
    return RegistryError{RegistryError::Kind::Malformed, msg};
}

void check_header(ByteReader& r, const char (&magic)[4], const char* what)
{
    Bytes m;
    try {
        m = r.raw(4);
    } catch (const DecodeError&) {
        throw malformed(std::string{what} + " truncated");
    }
    if (!std::equal(m.begin(), m.end(), magic)) throw malformed(std::string{"bad "} + what + " magic");
    if (r.u8() != VERSION) throw malformed(std::string{"unsupported "} + what + " version");
}
}  // namespace

Bytes encode_property_set(const symexec::PropertySet& props)
{
    ByteWriter w;
    w.put_bytes(BytesView{reinterpret_cast<const uint8_t*>(SET_MAGIC), 4});
    w.put_u8(VERSION);
    w.put_be32(static_cast<uint32_t>(props.properties.size()));
    for (const auto& p : props.properties) {
        w.put_field(p.id);
        w.put_u8(static_cast<uint8_t>(p.kind));
        w.put_u8(p.target ? 1 : 0);
        if (p.target) w.put_field(*p.target);
    }
    return std::move(w).take();
}

symexec::PropertySet decode_property_set(BytesView bytes)
{
    ByteReader r{bytes};
    check_header(r, SET_MAGIC, "property set");
    symexec::PropertySet out;
    try {
        uint32_t count = r.be32();
        for (uint32_t i = 0; i < count; ++i) {
            symexec::Property p;
            p.id = to_string(r.field());
            uint8_t kind = r.u8();
            if (kind > 1) throw malformed("bad property kind " + std::to_string(kind));
            p.kind = static_cast<symexec::PropertyKind>(kind);
            uint8_t has_target = r.u8();
            if (has_target > 1) throw malformed("bad property target flag");
            if (has_target) p.target = to_string(r.field());
            out.properties.push_back(std::move(p));
        }
        r.expect_done();
    } catch (const DecodeError& e) {
        throw malformed(e.what());
    }
    return out;
}

std::string property_set_to_text(const symexec::PropertySet& props)
{
    std::string out;
    for (const auto& p : props.properties) {
        out += p.id;
        out += ' ';
        out += symexec::property_kind_name(p.kind);
        if (p.target) {
            out += ' ';
            out += *p.target;
        }
        out += '\n';
    }
    return out;
}

symexec::PropertySet property_set_from_text(std::string_view text)
{
    symexec::PropertySet out;
    std::istringstream in{std::string{text}};
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields{line};
        symexec::Property p;
        std::string kind;
        if (!(fields >> p.id)) continue;  // blank
        if (p.id.front() == '#') continue;
        if (!(fields >> kind))
            throw malformed("line " + std::to_string(lineno) + ": missing property kind");
        if (kind == "assertion_unreachable")
            p.kind = symexec::PropertyKind::assertion_unreachable;
        else if (kind == "no_trap")
            p.kind = symexec::PropertyKind::no_trap;
        else
            throw malformed("line " + std::to_string(lineno) + ": unknown property kind '" + kind +
                            "'");
        std::string target;
        if (fields >> target) p.target = target;
        std::string extra;
        if (fields >> extra)
            throw malformed("line " + std::to_string(lineno) + ": trailing tokens");
        out.properties.push_back(std::move(p));
    }
    return out;
}

SignedRegistry make_registry(const symexec::PropertySet& props, const crypto::KeyPair& provider_key,
                             const crypto::KeyPair& consumer_key)
{
    Bytes body = encode_property_set(props);
    SignedRegistry reg;
    reg.props = props;
    reg.provider_sig = crypto::sign(body, provider_key);
    reg.consumer_sig = crypto::sign(body, consumer_key);
    return reg;
}

Bytes encode_registry(const SignedRegistry& reg)
{
    ByteWriter w;
    w.put_bytes(BytesView{reinterpret_cast<const uint8_t*>(REG_MAGIC), 4});
    w.put_u8(VERSION);
    w.put_field(encode_property_set(reg.props));
    w.put_field(reg.provider_sig);
    w.put_field(reg.consumer_sig);
    return std::move(w).take();
}

SignedRegistry decode_registry(BytesView bytes)
{
    ByteReader r{bytes};
    check_header(r, REG_MAGIC, "registry");
    SignedRegistry reg;
    try {
        reg.props = decode_property_set(r.field());
        reg.provider_sig = r.field();
        reg.consumer_sig = r.field();
        r.expect_done();
    } catch (const DecodeError& e) {
        throw malformed(e.what());
    }
    if (reg.provider_sig.size() != crypto::SIGNATURE_SIZE ||
        reg.consumer_sig.size() != crypto::SIGNATURE_SIZE)
        throw malformed("registry signature has wrong length");
    return reg;
}

bool registry_verify(const SignedRegistry& reg, BytesView provider_pub, BytesView consumer_pub)
{
    Bytes body = encode_property_set(reg.props);
    return crypto::verify(reg.provider_sig, body, provider_pub) &&
           crypto::verify(reg.consumer_sig, body, consumer_pub);
}

}  // namespace tcpa
