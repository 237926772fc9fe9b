// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace tcpa::mem
{
/// Heap-allocation probe backing the benchmark's peak-memory column.
/// Tracks live bytes allocated through global operator new/delete;
/// process-wide and thread-safe.
size_t current() noexcept;
size_t peak() noexcept;

/// Resets the peak watermark to the current live size.
void reset_peak() noexcept;

}  // namespace tcpa::mem
