#pragma once

#include <cstddef>
#include <new>
#include <vector>

namespace sparsegpt::memory {

/// Bytes currently held by tracked containers (all matrix storage).
std::size_t current_bytes() noexcept;
/// High-water mark of current_bytes() since the last reset_peak().
std::size_t peak_bytes() noexcept;
void reset_peak() noexcept;

namespace detail {
void on_allocate(std::size_t bytes) noexcept;
void on_deallocate(std::size_t bytes) noexcept;
} // namespace detail

template <class T>
struct TrackingAllocator {
    using value_type = T;

    TrackingAllocator() noexcept = default;
    template <class U>
    TrackingAllocator(const TrackingAllocator<U>&) noexcept {}

    T* allocate(std::size_t n)
    {
        T* p = std::allocator<T>{}.allocate(n);
        detail::on_allocate(n * sizeof(T));
        return p;
    }

    void deallocate(T* p, std::size_t n) noexcept
    {
        detail::on_deallocate(n * sizeof(T));
        std::allocator<T>{}.deallocate(p, n);
    }

    template <class U>
    bool operator==(const TrackingAllocator<U>&) const noexcept { return true; }
};

template <class T>
using tracked_vector = std::vector<T, TrackingAllocator<T>>;

} // namespace sparsegpt::memory
