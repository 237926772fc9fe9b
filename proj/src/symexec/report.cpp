// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/symexec/report.hpp>

#include <cstring>

namespace tcpa::symexec
{

const char* property_kind_name(PropertyKind k) noexcept
{
    return k == PropertyKind::assertion_unreachable ? "assertion_unreachable" : "no_trap";
}

const char* outcome_name(Outcome o) noexcept
{
    switch (o)
    {
    case Outcome::valid:
        return "valid";
    case Outcome::violated:
        return "violated";
    case Outcome::unknown:
        return "unknown";
    }
    return "?";
}

bool report_equal(const AnalysisReport& a, const AnalysisReport& b)
{
    return a.eo == b.eo && a.property_outcomes == b.property_outcomes &&
        a.stats.paths == b.stats.paths && a.stats.unknown_paths == b.stats.unknown_paths &&
        a.stats.unknown_reasons == b.stats.unknown_reasons;
}

std::string serialize_report(const AnalysisReport& r)
{
    std::string out = "tcpa-report v1\n";
    out += "eo " + std::string{r.eo ? "1" : "0"} + "\n";
    out += "properties " + std::to_string(r.property_outcomes.size()) + "\n";
    for (const PropertyOutcome& po : r.property_outcomes)
    {
        out += "property " + po.id + " " + property_kind_name(po.kind) + " " +
            outcome_name(po.outcome) + "\n";
        if (po.witness)
        {
            out += "witness " + std::to_string(po.witness->line) + " " +
                std::to_string(po.witness->col) + "\n";
            for (const auto& [name, value] : po.witness->model)
                out += "model " + name + " " + std::to_string(value) + "\n";
        }
    }
    out += "stats paths " + std::to_string(r.stats.paths) + " unknown " +
        std::to_string(r.stats.unknown_paths) + "\n";
    for (const auto& [reason, count] : r.stats.unknown_reasons)
        if (count > 0)
            out += "reason " + reason + " " + std::to_string(count) + "\n";
    return out;
}

namespace
{
constexpr char MAGIC[4] = {'T', 'C', 'A', 'R'};
constexpr uint8_t VERSION = 1;

void put_u16(std::vector<uint8_t>& out, uint16_t v)
{
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_str(std::vector<uint8_t>& out, const std::string& s)
{
    if (s.size() > 0xFFFF)
        throw ReportError{"string field too long"};
    put_u16(out, static_cast<uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

struct Reader
{
    const std::vector<uint8_t>& b;
    size_t pos = 0;

    void need(size_t n) const
    {
        if (pos + n > b.size())
            throw ReportError{"truncated report"};
    }

    uint8_t u8()
    {
        need(1);
        return b[pos++];
    }

    uint16_t u16()
    {
        need(2);
        const uint16_t v = static_cast<uint16_t>(b[pos]) |
            static_cast<uint16_t>(b[pos + 1]) << 8;
        pos += 2;
        return v;
    }

    uint32_t u32()
    {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(b[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }

    uint64_t u64()
    {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<uint64_t>(b[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }

    std::string str()
    {
        const uint16_t n = u16();
        need(n);
        std::string s(b.begin() + static_cast<ptrdiff_t>(pos),
            b.begin() + static_cast<ptrdiff_t>(pos + n));
        pos += n;
        return s;
    }
};
}  // namespace

std::vector<uint8_t> encode_report(const AnalysisReport& r)
{
    std::vector<uint8_t> out;
    out.insert(out.end(), MAGIC, MAGIC + 4);
    out.push_back(VERSION);
    out.push_back(r.eo ? 1 : 0);
    put_u32(out, static_cast<uint32_t>(r.property_outcomes.size()));
    for (const PropertyOutcome& po : r.property_outcomes)
    {
        put_str(out, po.id);
        out.push_back(static_cast<uint8_t>(po.kind));
        out.push_back(static_cast<uint8_t>(po.outcome));
        out.push_back(po.witness ? 1 : 0);
        if (po.witness)
        {
            put_u32(out, po.witness->line);
            put_u32(out, po.witness->col);
            put_u16(out, static_cast<uint16_t>(po.witness->model.size()));
            for (const auto& [name, value] : po.witness->model)
            {
                put_str(out, name);
                put_u64(out, value);
            }
        }
    }
    put_u64(out, r.stats.paths);
    put_u64(out, r.stats.unknown_paths);
    put_u16(out, static_cast<uint16_t>(r.stats.unknown_reasons.size()));
    for (const auto& [reason, count] : r.stats.unknown_reasons)
    {
        put_str(out, reason);
        put_u64(out, count);
    }
    return out;
}

AnalysisReport decode_report(const std::vector<uint8_t>& bytes)
{
    Reader rd{bytes};
    rd.need(4);
    if (std::memcmp(bytes.data(), MAGIC, 4) != 0)
        throw ReportError{"bad report magic"};
    rd.pos = 4;
    if (rd.u8() != VERSION)
        throw ReportError{"unsupported report version"};

    AnalysisReport r;
    r.eo = rd.u8() != 0;
    const uint32_t nprops = rd.u32();
    for (uint32_t i = 0; i < nprops; ++i)
    {
        PropertyOutcome po;
        po.id = rd.str();
        const uint8_t kind = rd.u8();
        if (kind > 1)
            throw ReportError{"bad property kind"};
        po.kind = static_cast<PropertyKind>(kind);
        const uint8_t outcome = rd.u8();
        if (outcome > 2)
            throw ReportError{"bad outcome"};
        po.outcome = static_cast<Outcome>(outcome);
        if (rd.u8() != 0)
        {
            Witness w;
            w.line = rd.u32();
            w.col = rd.u32();
            const uint16_t n = rd.u16();
            for (uint16_t k = 0; k < n; ++k)
            {
                const std::string name = rd.str();
                w.model[name] = rd.u64();
            }
            po.witness = std::move(w);
        }
        r.property_outcomes.push_back(std::move(po));
    }
    r.stats.paths = rd.u64();
    r.stats.unknown_paths = rd.u64();
    const uint16_t nreasons = rd.u16();
    for (uint16_t i = 0; i < nreasons; ++i)
    {
        const std::string reason = rd.str();
        r.stats.unknown_reasons[reason] = rd.u64();
    }
    if (rd.pos != bytes.size())
        throw ReportError{"trailing bytes after report"};
    return r;
}

}  // namespace tcpa::symexec
