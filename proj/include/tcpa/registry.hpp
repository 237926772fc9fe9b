// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tcpa/bytes.hpp"
#include "tcpa/crypto.hpp"
#include "tcpa/symexec/props.hpp"

// Property registry.
//
// The canonical property-set encoding produced here is the P image that
// both parties measure and that the isolated computation analyzes
// against. A registry file (.tcpr) wraps that encoding with one
// signature from each party over exactly those bytes, recording that
// both agreed to the same properties before any job ran.

namespace tcpa
{
struct RegistryError : std::runtime_error
{
    enum class Kind
    {
        Malformed,
        BadSignature,
    };

    RegistryError(Kind k, const std::string& msg) : std::runtime_error{msg}, kind{k} {}

    Kind kind;
};

/// Canonical byte encoding of a property set ("TCPP" header). Stable
/// across platforms; these bytes are what measure() sees as P.
Bytes encode_property_set(const symexec::PropertySet& props);
symexec::PropertySet decode_property_set(BytesView bytes);

/// Text authoring form, one property per line:
///   <id> assertion_unreachable|no_trap [<target export>]
/// Blank lines and lines starting with '#' are skipped.
std::string property_set_to_text(const symexec::PropertySet& props);
symexec::PropertySet property_set_from_text(std::string_view text);

struct SignedRegistry
{
    symexec::PropertySet props;
    Bytes provider_sig;
    Bytes consumer_sig;

    bool operator==(const SignedRegistry&) const = default;
};

SignedRegistry make_registry(const symexec::PropertySet& props, const crypto::KeyPair& provider_key,
                             const crypto::KeyPair& consumer_key);

Bytes encode_registry(const SignedRegistry& reg);
SignedRegistry decode_registry(BytesView bytes);

/// True iff both signatures verify over the canonical property-set bytes.
bool registry_verify(const SignedRegistry& reg, BytesView provider_pub, BytesView consumer_pub);

}  // namespace tcpa
