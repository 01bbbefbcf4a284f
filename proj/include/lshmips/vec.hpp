#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>

namespace lshmips {

/// Inner product with two running sums; fixed evaluation order keeps results
/// reproducible across runs.
inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 1 < n; i += 2) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
    }
    if (i < n) s0 += a[i] * b[i];
    return s0 + s1;
}

inline double squared_norm(std::span<const double> v) { return dot(v, v); }

inline double euclidean_norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

} // namespace lshmips
