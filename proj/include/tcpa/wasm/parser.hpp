// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/wasm/module.hpp>

namespace tcpa::wasm
{
/// Decodes and validates a binary module. Instruction byte_offsets are
/// relative to the code section payload. Accepts non-minimal LEB128.
Module parse_module(BytesView input);

}  // namespace tcpa::wasm
