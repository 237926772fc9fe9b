// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/bytes.hpp>
#include <tcpa/wasm/source_map.hpp>

#include <algorithm>
#include <charconv>
#include <set>

namespace tcpa::wasm
{
SourceMap::SourceMap(std::vector<Entry> entries) : m_entries{std::move(entries)}
{
    std::sort(m_entries.begin(), m_entries.end(),
        [](const Entry& a, const Entry& b) { return a.offset < b.offset; });
    std::set<std::pair<uint32_t, uint32_t>> positions;
    for (size_t i = 0; i < m_entries.size(); ++i)
    {
        if (i > 0 && m_entries[i].offset == m_entries[i - 1].offset)
            throw DecodeError{"source map: duplicate offset " +
                              std::to_string(m_entries[i].offset)};
        if (!positions.insert({m_entries[i].line, m_entries[i].col}).second)
            throw DecodeError{"source map: duplicate position " +
                              std::to_string(m_entries[i].line) + ":" +
                              std::to_string(m_entries[i].col)};
    }
}

std::optional<SourceMap::Entry> SourceMap::lookup(uint32_t offset) const
{
    const auto it = std::lower_bound(m_entries.begin(), m_entries.end(), offset,
        [](const Entry& e, uint32_t off) { return e.offset < off; });
    if (it == m_entries.end() || it->offset != offset)
        return std::nullopt;
    return *it;
}

std::optional<SourceMap::Entry> SourceMap::reverse_lookup(uint32_t line, uint32_t col) const
{
    for (const Entry& e : m_entries)
        if (e.line == line && e.col == col)
            return e;
    return std::nullopt;
}

std::string SourceMap::serialize() const
{
    std::string out;
    for (const Entry& e : m_entries)
    {
        out += std::to_string(e.offset);
        out += '\t';
        out += std::to_string(e.line);
        out += '\t';
        out += std::to_string(e.col);
        out += '\n';
    }
    return out;
}

namespace
{
uint32_t parse_u32_field(std::string_view text, size_t line_no)
{
    uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DecodeError{"source map: bad integer on line " + std::to_string(line_no)};
    return value;
}
}  // namespace

SourceMap SourceMap::deserialize(std::string_view text)
{
    std::vector<Entry> entries;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos < text.size())
    {
        ++line_no;
        size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty())
            continue;
        const size_t t1 = line.find('\t');
        const size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t1 == std::string_view::npos || t2 == std::string_view::npos)
            throw DecodeError{"source map: malformed line " + std::to_string(line_no)};
        entries.push_back({parse_u32_field(line.substr(0, t1), line_no),
            parse_u32_field(line.substr(t1 + 1, t2 - t1 - 1), line_no),
            parse_u32_field(line.substr(t2 + 1), line_no)});
    }
    return SourceMap{std::move(entries)};
}

}  // namespace tcpa::wasm
