// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/wasm/module.hpp>

namespace tcpa::wasm
{
/// Canonical binary encoding: sections in id order, empty sections omitted,
/// minimal LEB128 throughout, locals compressed into runs, the table image
/// emitted as contiguous element segments. Identical modules encode to
/// identical bytes.
///
/// When `instr_offsets` is non-null it receives, per defined function, the
/// offset of each instruction relative to the code section payload.
Bytes encode_module(const Module& m, std::vector<std::vector<uint32_t>>* instr_offsets = nullptr);

}  // namespace tcpa::wasm
