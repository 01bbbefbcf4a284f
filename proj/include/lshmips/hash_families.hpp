#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "lshmips/common.hpp"
#include "lshmips/rng.hpp"
#include "lshmips/vec.hpp"

namespace lshmips {

/// One symbol per hash function. Symbol domains by family:
///   Euclidean LSH      - signed bucket index (any int32)
///   sign projection    - +1 or -1
///   cross-polytope     - sign * (coordinate + 1), so {+-1, ..., +-D'}
struct HashCode {
    std::vector<std::int32_t> symbols;

    bool operator==(const HashCode&) const = default;
    auto operator<=>(const HashCode&) const = default;

    std::size_t size() const { return symbols.size(); }
};

struct HashCodeHasher {
    std::size_t operator()(const HashCode& c) const {
        // FNV-1a over the symbol bytes.
        std::uint64_t h = 1469598103934665603ULL;
        for (std::int32_t s : c.symbols) {
            auto u = static_cast<std::uint32_t>(s);
            for (int i = 0; i < 4; ++i) {
                h ^= (u >> (8 * i)) & 0xffu;
                h *= 1099511628211ULL;
            }
        }
        return static_cast<std::size_t>(h);
    }
};

/// Number of positions where two codes carry the same symbol.
inline std::uint32_t match_count(const HashCode& a, const HashCode& b) {
    std::uint32_t l = 0;
    const std::size_t n = std::min(a.symbols.size(), b.symbols.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a.symbols[i] == b.symbols[i]) ++l;
    return l;
}

/// Standard normal CDF via the complementary error function.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

/// Euclidean-distance LSH: h(x) = floor((a.x + b) / r) with standard normal
/// projections and offsets uniform on [0, r]. Regenerating from the same
/// seed reproduces the family bit for bit.
class L2HashFamily {
public:
    L2HashFamily(std::uint64_t seed, std::size_t functions, std::size_t dim, double width)
        : functions_(functions), dim_(dim), width_(width) {
        if (functions < 1) throw UsageError("hash family needs at least one function");
        if (dim < 1) throw UsageError("hash family needs dim >= 1");
        if (width <= 0.0) throw UsageError("bucket width must be positive");
        SeededRng rng(seed);
        projections_.resize(functions * dim);
        offsets_.resize(functions);
        for (std::size_t f = 0; f < functions; ++f) {
            for (std::size_t j = 0; j < dim; ++j) projections_[f * dim + j] = rng.gaussian();
            offsets_[f] = rng.uniform(0.0, width);
        }
    }

    /// Family with explicit parameters (row-major projections).
    L2HashFamily(std::vector<double> projections, std::vector<double> offsets, std::size_t dim,
                 double width)
        : functions_(offsets.size()), dim_(dim), width_(width),
          projections_(std::move(projections)), offsets_(std::move(offsets)) {
        if (projections_.size() != functions_ * dim_)
            throw UsageError("projection matrix size does not match functions x dim");
        if (width <= 0.0) throw UsageError("bucket width must be positive");
    }

    HashCode hash(std::span<const double> v) const {
        if (v.size() != dim_) throw UsageError("vector dimension does not match hash family");
        HashCode code;
        code.symbols.resize(functions_);
        for (std::size_t f = 0; f < functions_; ++f) {
            double proj = dot({projections_.data() + f * dim_, dim_}, v);
            code.symbols[f] = static_cast<std::int32_t>(std::floor((proj + offsets_[f]) / width_));
        }
        return code;
    }

    std::size_t functions() const { return functions_; }
    std::size_t dim() const { return dim_; }
    double width() const { return width_; }

private:
    std::size_t functions_;
    std::size_t dim_;
    double width_;
    std::vector<double> projections_; // functions x dim, row-major
    std::vector<double> offsets_;
};

/// Sign random projection: h(x) = sign(a.x), with sign(0) taken as +1.
class SrpFamily {
public:
    SrpFamily(std::uint64_t seed, std::size_t functions, std::size_t dim)
        : functions_(functions), dim_(dim) {
        if (functions < 1) throw UsageError("hash family needs at least one function");
        if (dim < 1) throw UsageError("hash family needs dim >= 1");
        SeededRng rng(seed);
        projections_.resize(functions * dim);
        for (double& e : projections_) e = rng.gaussian();
    }

    HashCode hash(std::span<const double> v) const {
        if (v.size() != dim_) throw UsageError("vector dimension does not match hash family");
        HashCode code;
        code.symbols.resize(functions_);
        for (std::size_t f = 0; f < functions_; ++f) {
            double proj = dot({projections_.data() + f * dim_, dim_}, v);
            code.symbols[f] = proj < 0.0 ? -1 : 1;
        }
        return code;
    }

    std::size_t functions() const { return functions_; }
    std::size_t dim() const { return dim_; }

private:
    std::size_t functions_;
    std::size_t dim_;
    std::vector<double> projections_;
};

/// Cross-polytope LSH. Each function projects through a dense Gaussian
/// matrix A (output_dim x dim), normalizes, and maps to the closest signed
/// standard basis vector, an alphabet of size 2 * output_dim.
class CrossPolytopeFamily {
public:
    CrossPolytopeFamily(std::uint64_t seed, std::size_t functions, std::size_t dim,
                        std::size_t output_dim)
        : functions_(functions), dim_(dim), output_dim_(output_dim) {
        if (functions < 1) throw UsageError("hash family needs at least one function");
        if (dim < 1) throw UsageError("hash family needs dim >= 1");
        if (output_dim < 1) throw UsageError("cross-polytope output dimension must be >= 1");
        SeededRng rng(seed);
        matrices_.resize(functions * output_dim * dim);
        for (double& e : matrices_) e = rng.gaussian();
    }

    /// Family with explicit matrices (functions x output_dim x dim, row-major).
    CrossPolytopeFamily(std::vector<double> matrices, std::size_t functions, std::size_t dim,
                        std::size_t output_dim)
        : functions_(functions), dim_(dim), output_dim_(output_dim),
          matrices_(std::move(matrices)) {
        if (matrices_.size() != functions * output_dim * dim)
            throw UsageError("matrix size does not match functions x output_dim x dim");
    }

    /// Normalized projection y = A v / ||A v|| for one function.
    std::vector<double> normalized_projection(std::span<const double> v, std::size_t f) const {
        if (v.size() != dim_) throw UsageError("vector dimension does not match hash family");
        std::vector<double> y(output_dim_);
        const double* A = matrices_.data() + f * output_dim_ * dim_;
        for (std::size_t r = 0; r < output_dim_; ++r)
            y[r] = dot({A + r * dim_, dim_}, v);
        double nrm = euclidean_norm(y);
        if (nrm == 0.0) throw DataError("degenerate cross-polytope projection (A v = 0)");
        for (double& e : y) e /= nrm;
        return y;
    }

    /// Symbol of the closest signed basis vector to y; ties go to the
    /// smallest coordinate, zero signs count as positive.
    static std::int32_t closest_symbol(std::span<const double> y) {
        std::size_t best = 0;
        double best_mag = std::abs(y[0]);
        for (std::size_t i = 1; i < y.size(); ++i) {
            double mag = std::abs(y[i]);
            if (mag > best_mag) {
                best = i;
                best_mag = mag;
            }
        }
        int sign = y[best] < 0.0 ? -1 : 1;
        return sign * static_cast<std::int32_t>(best + 1);
    }

    HashCode hash(std::span<const double> v) const {
        HashCode code;
        code.symbols.resize(functions_);
        for (std::size_t f = 0; f < functions_; ++f) {
            auto y = normalized_projection(v, f);
            code.symbols[f] = closest_symbol(y);
        }
        return code;
    }

    std::size_t functions() const { return functions_; }
    std::size_t dim() const { return dim_; }
    std::size_t output_dim() const { return output_dim_; }

private:
    std::size_t functions_;
    std::size_t dim_;
    std::size_t output_dim_;
    std::vector<double> matrices_; // functions x output_dim x dim
};

inline HashCode hash_l2(const L2HashFamily& fam, std::span<const double> v) { return fam.hash(v); }
inline HashCode hash_srp(const SrpFamily& fam, std::span<const double> v) { return fam.hash(v); }
inline HashCode hash_crosspolytope(const CrossPolytopeFamily& fam, std::span<const double> v) {
    return fam.hash(v);
}

/// Collision probability of the Euclidean LSH at bucket width r for two
/// points at distance d:
///   F_r(d) = 1 - 2 Phi(-r/d) - (2d / (sqrt(2 pi) r)) (1 - exp(-(r/d)^2 / 2))
inline double collision_prob_l2(double r, double d) {
    if (r <= 0.0) throw UsageError("collision_prob_l2 requires r > 0");
    if (d <= 0.0) throw UsageError("collision_prob_l2 requires d > 0");
    const double ratio = r / d;
    const double sqrt_2pi = 2.5066282746310005024;
    return 1.0 - 2.0 * normal_cdf(-ratio) -
           (2.0 * d / (sqrt_2pi * r)) * (1.0 - std::exp(-0.5 * ratio * ratio));
}

/// Angular collision probability of sign random projection:
///   1 - arccos(cosine) / pi. Inputs are clamped to [-1, 1] to absorb
///   rounding in upstream cosine computations.
inline double collision_prob_srp(double cosine) {
    double c = std::clamp(cosine, -1.0, 1.0);
    return 1.0 - std::acos(c) / 3.14159265358979323846;
}

struct InvertedDistance {
    double distance = 0.0;
    /// Set when the requested probability was clamped away from {0, 1};
    /// empirical match fractions can be exactly saturated.
    bool saturated = false;
};

/// Inverts F_r by bisection: finds d with |F_r(d) - p| <= 1e-9. The
/// probability is clamped to [1e-9, 1 - 1e-9] and the clamp is reported.
inline InvertedDistance invert_collision_l2(double r, double p) {
    if (r <= 0.0) throw UsageError("invert_collision_l2 requires r > 0");
    constexpr double eps = 1e-9;
    InvertedDistance out;
    if (p < eps) {
        p = eps;
        out.saturated = true;
    } else if (p > 1.0 - eps) {
        p = 1.0 - eps;
        out.saturated = true;
    }
    // F_r decreases from 1 (d -> 0) to 0 (d -> inf). Grow the bracket until
    // it straddles p, then bisect.
    double hi = r;
    while (collision_prob_l2(r, hi) > p) hi *= 2.0;
    double lo = 0.0; // limit value 1 > p
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double f = collision_prob_l2(r, mid);
        if (std::abs(f - p) <= 1e-12) {
            out.distance = mid;
            return out;
        }
        if (f > p)
            lo = mid;
        else
            hi = mid;
    }
    out.distance = 0.5 * (lo + hi);
    return out;
}

/// Squared residual ||y - s e_i||^2 between the normalized projection of v
/// under function f and the signed basis vector encoded by the symbol.
/// Equal to 2 - 2 cos(angle), so it grows monotonically with the angle and
/// is minimized by the symbol the vector hashes to.
inline double crosspolytope_residual(const CrossPolytopeFamily& fam, std::span<const double> v,
                                     std::int32_t symbol, std::size_t function_idx) {
    if (symbol == 0 || static_cast<std::size_t>(std::abs(symbol)) > fam.output_dim())
        throw UsageError("cross-polytope symbol out of range");
    auto y = fam.normalized_projection(v, function_idx);
    double coord = y[static_cast<std::size_t>(std::abs(symbol)) - 1];
    double aligned = symbol < 0 ? -coord : coord;
    return 2.0 - 2.0 * aligned;
}

} // namespace lshmips
