// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/build_check.hpp>

#include <tcpa/wasm/assembler.hpp>
#include <tcpa/wasm/errors.hpp>

#include <algorithm>

namespace tcpa::build_check
{
Bytes BuilderConfig::serialize() const
{
    std::string text = "builder reference_assembler\n";
    text += "deterministic ";
    text += deterministic ? '1' : '0';
    text += '\n';
    return to_bytes(text);
}

BuilderConfig BuilderConfig::deserialize(BytesView bytes)
{
    const std::string text = to_string(bytes);
    BuilderConfig b;
    if (text == "builder reference_assembler\ndeterministic 1\n")
        b.deterministic = true;
    else if (text == "builder reference_assembler\ndeterministic 0\n")
        b.deterministic = false;
    else
        throw DecodeError{"unrecognized builder configuration"};
    return b;
}

BuildResult build_executable(const BuilderConfig& b, std::string_view source)
{
    (void)b;  // a single builder kind exists; the config still names it
    try
    {
        wasm::AssembledModule am = wasm::assemble_text(source);
        return {std::move(am.bytes), std::move(am.map)};
    }
    catch (const wasm::AsmError& e)
    {
        throw BuildFailed{e.what(), e.line, e.col};
    }
}

bool compare_executables(BytesView e, BytesView e_prime)
{
    return e.size() == e_prime.size() && std::equal(e.begin(), e.end(), e_prime.begin());
}

}  // namespace tcpa::build_check
