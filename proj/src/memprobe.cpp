// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tcpa/memprobe.hpp"

#include <malloc.h>

#include <atomic>
#include <cstdlib>
#include <new>

namespace
{
std::atomic<size_t> g_live{0};
std::atomic<size_t> g_peak{0};

void account_alloc(void* p) noexcept
{
    const size_t n = malloc_usable_size(p);
    const size_t live = g_live.fetch_add(n, std::memory_order_relaxed) + n;
    size_t peak = g_peak.load(std::memory_order_relaxed);
    while (live > peak && !g_peak.compare_exchange_weak(peak, live, std::memory_order_relaxed))
    {
    }
}

void account_free(void* p) noexcept
{
    if (p != nullptr)
        g_live.fetch_sub(malloc_usable_size(p), std::memory_order_relaxed);
}

void* checked_malloc(size_t size)
{
    void* p = std::malloc(size == 0 ? 1 : size);
    if (p == nullptr)
        throw std::bad_alloc{};
    account_alloc(p);
    return p;
}

void* checked_aligned(size_t size, size_t align)
{
    void* p = nullptr;
    if (posix_memalign(&p, align < sizeof(void*) ? sizeof(void*) : align, size == 0 ? 1 : size) != 0)
        throw std::bad_alloc{};
    account_alloc(p);
    return p;
}
}  // namespace

namespace tcpa::mem
{
size_t current() noexcept
{
    return g_live.load(std::memory_order_relaxed);
}

size_t peak() noexcept
{
    return g_peak.load(std::memory_order_relaxed);
}

void reset_peak() noexcept
{
    g_peak.store(g_live.load(std::memory_order_relaxed), std::memory_order_relaxed);
}

}  // namespace tcpa::mem

void* operator new(size_t size)
{
    return checked_malloc(size);
}

void* operator new[](size_t size)
{
    return checked_malloc(size);
}

void* operator new(size_t size, std::align_val_t align)
{
    return checked_aligned(size, static_cast<size_t>(align));
}

void* operator new[](size_t size, std::align_val_t align)
{
    return checked_aligned(size, static_cast<size_t>(align));
}

void* operator new(size_t size, const std::nothrow_t&) noexcept
{
    void* p = std::malloc(size == 0 ? 1 : size);
    if (p != nullptr)
        account_alloc(p);
    return p;
}

void* operator new[](size_t size, const std::nothrow_t&) noexcept
{
    return operator new(size, std::nothrow);
}

void operator delete(void* p) noexcept
{
    account_free(p);
    std::free(p);
}

void operator delete[](void* p) noexcept
{
    account_free(p);
    std::free(p);
}

void operator delete(void* p, size_t) noexcept
{
    account_free(p);
    std::free(p);
}

void operator delete[](void* p, size_t) noexcept
{
    account_free(p);
    std::free(p);
}

void operator delete(void* p, std::align_val_t) noexcept
{
    account_free(p);
    std::free(p);
}

void operator delete[](void* p, std::align_val_t) noexcept
{
    account_free(p);
    std::free(p);
}

void operator delete(void* p, size_t, std::align_val_t) noexcept
{
    account_free(p);
    std::free(p);
}

void operator delete[](void* p, size_t, std::align_val_t) noexcept
{
    account_free(p);
    std::free(p);
}

void operator delete(void* p, const std::nothrow_t&) noexcept
{
    account_free(p);
    std::free(p);
}

void operator delete[](void* p, const std::nothrow_t&) noexcept
{
    account_free(p);
    std::free(p);
}
