// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/symexec/props.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcpa::symexec
{

enum class Outcome : uint8_t
{
    valid = 0,
    violated = 1,
    unknown = 2,
};

const char* outcome_name(Outcome o) noexcept;

/// A model over the entry argument symbols plus the source location the
/// replayed trap occurs at.
struct Witness
{
    std::map<std::string, uint64_t> model;
    uint32_t line = 0;
    uint32_t col = 0;

    bool operator==(const Witness&) const = default;
};

struct PropertyOutcome
{
    std::string id;
    PropertyKind kind = PropertyKind::no_trap;
    Outcome outcome = Outcome::unknown;
    std::optional<Witness> witness;

    bool operator==(const PropertyOutcome&) const = default;
};

struct ReportStats
{
    uint64_t paths = 0;          // completed paths (returned or trapped)
    uint64_t unknown_paths = 0;  // paths abandoned before completion
    /// Reason tallies for unknown paths (key examples: "depth", "unroll",
    /// "solver", "concretize").
    std::map<std::string, uint64_t> unknown_reasons;
    /// Wall time and peak RSS are informational only: they are excluded
    /// from the canonical forms so reports stay byte-reproducible.
    uint64_t time_ms = 0;
    uint64_t peak_memory_bytes = 0;
};

struct AnalysisReport
{
    bool eo = false;  // executable equality, filled in by the build check
    std::vector<PropertyOutcome> property_outcomes;
    ReportStats stats;
};

/// Equality over the canonical (deterministic) fields; time and memory
/// are ignored.
bool report_equal(const AnalysisReport& a, const AnalysisReport& b);

struct ReportError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Canonical text form, one key per line, fixed key order.
std::string serialize_report(const AnalysisReport& r);

/// Canonical byte form embedded in compliance certificates.
std::vector<uint8_t> encode_report(const AnalysisReport& r);

/// Inverse of encode_report; throws ReportError on malformed input.
AnalysisReport decode_report(const std::vector<uint8_t>& bytes);

}  // namespace tcpa::symexec
