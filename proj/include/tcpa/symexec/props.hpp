// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tcpa::symexec
{

enum class PropertyKind : uint8_t
{
    /// The env.tcpa_assert import is never reached with a zero argument.
    assertion_unreachable = 0,
    /// No trap of any kind is reachable (assert failures included).
    no_trap = 1,
};

const char* property_kind_name(PropertyKind k) noexcept;

struct Property
{
    std::string id;
    PropertyKind kind = PropertyKind::no_trap;
    /// Export to analyze; absent means every exported function.
    std::optional<std::string> target;

    bool operator==(const Property&) const = default;
};

struct PropertySet
{
    std::vector<Property> properties;

    bool operator==(const PropertySet&) const = default;
};

}  // namespace tcpa::symexec
