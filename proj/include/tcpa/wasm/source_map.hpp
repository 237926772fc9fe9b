// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcpa::wasm
{
/// Maps instruction byte offsets (relative to the code section payload) to
/// 1-based source line/column positions. Total over all instructions of a
/// build and invertible: offsets and positions are both unique.
class SourceMap
{
public:
    struct Entry
    {
        uint32_t offset = 0;
        uint32_t line = 0;
        uint32_t col = 0;

        bool operator==(const Entry&) const = default;
    };

    SourceMap() = default;
    /// Entries must be unique in both directions; sorted by offset here.
    explicit SourceMap(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const noexcept { return m_entries; }
    bool operator==(const SourceMap&) const = default;

    std::optional<Entry> lookup(uint32_t offset) const;
    std::optional<Entry> reverse_lookup(uint32_t line, uint32_t col) const;

    /// One entry per line: "offset<TAB>line<TAB>col\n", sorted by offset.
    std::string serialize() const;
    static SourceMap deserialize(std::string_view text);

private:
    std::vector<Entry> m_entries;  // sorted by offset
};

}  // namespace tcpa::wasm
