#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace hdm {

inline constexpr std::size_t kBlock = 512;

// Sum of f(i) over [0, n) in fixed blocks. Partial sums are combined in
// block order, so the result does not depend on the thread count.
template <std::size_t K, class F>
std::array<double, K> block_sum(std::size_t n, F&& f) {
    const std::size_t nb = (n + kBlock - 1) / kBlock;
    std::vector<std::array<double, K>> part(nb);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nb); ++b) {
        std::array<double, K> acc{};
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
        for (std::size_t i = lo; i < hi; ++i) f(i, acc);
        part[b] = acc;
    }
    std::array<double, K> out{};
    for (const auto& a : part)
        for (std::size_t k = 0; k < K; ++k) out[k] += a[k];
    return out;
}

}  // namespace hdm
