// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/wasm/module.hpp>
#include <tcpa/wasm/source_map.hpp>

#include <string_view>

namespace tcpa::wasm
{
struct AssembledModule
{
    Bytes bytes;
    SourceMap map;
};

/// Assembles the textual subset: one `(module ...)` form whose functions
/// hold flat instructions, one per line by convention. Produces the
/// canonical binary encoding and a source map covering every instruction,
/// including each function's implicit closing `end` (mapped to the
/// position of the closing parenthesis).
AssembledModule assemble_text(std::string_view source);

}  // namespace tcpa::wasm
