#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lshmips/common.hpp"
#include "lshmips/vec.hpp"

namespace lshmips {

/// Parameters of the asymmetric transformations. The normalization factor
/// is the maximum norm of the (sub-)dataset the transform is applied to.
struct AlshParams {
    double shrink = 0.83;    // U in (0, 1)
    std::uint32_t tail_length = 3; // m, number of appended tail entries
    double bucket_width = 2.5;     // r, Euclidean LSH only
    double max_norm = 1.0;         // M, normalization factor

    void validate() const {
        if (!(shrink > 0.0 && shrink < 1.0)) throw UsageError("shrink factor U must be in (0, 1)");
        if (tail_length < 1) throw UsageError("tail length m must be >= 1");
        if (!(max_norm >= 0.0)) throw UsageError("normalization factor M must be nonnegative");
    }
};

inline AlshParams default_l2alsh_params(double max_norm = 1.0) {
    return AlshParams{0.83, 3, 2.5, max_norm};
}

inline AlshParams default_signalsh_params(double max_norm = 1.0) {
    return AlshParams{0.75, 2, 2.5, max_norm};
}

namespace detail {

inline void check_item_norm(std::span<const double> x, double max_norm) {
    double nrm = euclidean_norm(x);
    if (nrm > max_norm * (1.0 + 1e-9))
        throw UsageError("item norm exceeds the normalization factor");
}

inline void check_unit_query(std::span<const double> q) {
    double nrm = euclidean_norm(q);
    if (std::abs(nrm - 1.0) > 1e-9) throw UsageError("query must have unit norm");
}

// Scaled copy (U/M) x; a zero normalization factor only occurs when every
// item in the group is the zero vector, which scales to zero anyway.
inline void scaled_copy(std::span<const double> x, double factor, std::vector<double>& out) {
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * factor;
}

} // namespace detail

/// Item transform reducing inner products to Euclidean distance:
/// P(x) = [Ux/M; ||Ux/M||^2; ||Ux/M||^4; ...; ||Ux/M||^(2^m)].
inline void l2alsh_item(std::span<const double> x, const AlshParams& p, std::vector<double>& out) {
    p.validate();
    detail::check_item_norm(x, p.max_norm);
    double factor = p.max_norm > 0.0 ? p.shrink / p.max_norm : 0.0;
    detail::scaled_copy(x, factor, out);
    double power = squared_norm(out); // ||Ux/M||^2
    out.reserve(x.size() + p.tail_length);
    for (std::uint32_t i = 0; i < p.tail_length; ++i) {
        out.push_back(power);
        power *= power;
    }
}

/// Query transform paired with l2alsh_item: Q(q) = [q; 1/2; ...; 1/2].
inline void l2alsh_query(std::span<const double> q, const AlshParams& p,
                         std::vector<double>& out) {
    p.validate();
    detail::check_unit_query(q);
    out.assign(q.begin(), q.end());
    out.insert(out.end(), p.tail_length, 0.5);
}

/// Item transform reducing inner products to angular similarity:
/// P(x) = [Ux/M; 1/2 - ||Ux/M||^2; ...; 1/2 - ||Ux/M||^(2^m)].
inline void signalsh_item(std::span<const double> x, const AlshParams& p,
                          std::vector<double>& out) {
    p.validate();
    detail::check_item_norm(x, p.max_norm);
    double factor = p.max_norm > 0.0 ? p.shrink / p.max_norm : 0.0;
    detail::scaled_copy(x, factor, out);
    double power = squared_norm(out);
    out.reserve(x.size() + p.tail_length);
    for (std::uint32_t i = 0; i < p.tail_length; ++i) {
        out.push_back(0.5 - power);
        power *= power;
    }
}

/// Query transform paired with signalsh_item: Q(q) = [q; 0; ...; 0].
inline void signalsh_query(std::span<const double> q, const AlshParams& p,
                           std::vector<double>& out) {
    p.validate();
    detail::check_unit_query(q);
    out.assign(q.begin(), q.end());
    out.insert(out.end(), p.tail_length, 0.0);
}

/// Symmetric transform onto the unit sphere: [v/M; sqrt(1 - ||v/M||^2)].
/// The radicand is clamped at zero so items of maximal norm stay finite.
inline void simple_transform(std::span<const double> v, double max_norm,
                             std::vector<double>& out) {
    detail::check_item_norm(v, max_norm);
    double factor = max_norm > 0.0 ? 1.0 / max_norm : 0.0;
    detail::scaled_copy(v, factor, out);
    double radicand = 1.0 - squared_norm(out);
    out.push_back(std::sqrt(std::max(0.0, radicand)));
}

/// Query-side transform for the symmetric reduction; a unit query gets an
/// exact zero appended.
inline void simple_query(std::span<const double> q, std::vector<double>& out) {
    detail::check_unit_query(q);
    out.assign(q.begin(), q.end());
    out.push_back(0.0);
}

// Allocating conveniences used by tests and one-off callers.
inline std::vector<double> l2alsh_item(std::span<const double> x, const AlshParams& p) {
    std::vector<double> out;
    l2alsh_item(x, p, out);
    return out;
}
inline std::vector<double> l2alsh_query(std::span<const double> q, const AlshParams& p) {
    std::vector<double> out;
    l2alsh_query(q, p, out);
    return out;
}
inline std::vector<double> signalsh_item(std::span<const double> x, const AlshParams& p) {
    std::vector<double> out;
    signalsh_item(x, p, out);
    return out;
}
inline std::vector<double> signalsh_query(std::span<const double> q, const AlshParams& p) {
    std::vector<double> out;
    signalsh_query(q, p, out);
    return out;
}
inline std::vector<double> simple_transform(std::span<const double> v, double max_norm) {
    std::vector<double> out;
    simple_transform(v, max_norm, out);
    return out;
}
inline std::vector<double> simple_query(std::span<const double> q) {
    std::vector<double> out;
    simple_query(q, out);
    return out;
}

/// Item transform dispatch. Simple-LSH and Cross-LSH share the symmetric
/// unit-sphere transform; the ALSH pair append their tails.
inline void transform_item(MetaAlgorithm algo, std::span<const double> x, const AlshParams& p,
                           std::vector<double>& out) {
    switch (algo) {
        case MetaAlgorithm::L2Alsh: l2alsh_item(x, p, out); return;
        case MetaAlgorithm::SignAlsh: signalsh_item(x, p, out); return;
        case MetaAlgorithm::SimpleLsh:
        case MetaAlgorithm::CrossLsh: simple_transform(x, p.max_norm, out); return;
    }
    throw UsageError("unknown algorithm");
}

/// Query transform dispatch. No variant depends on the normalization
/// factor, which is what lets sub-indexes share one hashed query.
inline void transform_query(MetaAlgorithm algo, std::span<const double> q, const AlshParams& p,
                            std::vector<double>& out) {
    switch (algo) {
        case MetaAlgorithm::L2Alsh: l2alsh_query(q, p, out); return;
        case MetaAlgorithm::SignAlsh: signalsh_query(q, p, out); return;
        case MetaAlgorithm::SimpleLsh:
        case MetaAlgorithm::CrossLsh: simple_query(q, out); return;
    }
    throw UsageError("unknown algorithm");
}

/// Dimension of the transformed space for a given algorithm.
inline std::size_t transformed_dim(MetaAlgorithm algo, std::size_t d, std::uint32_t tail_length) {
    switch (algo) {
        case MetaAlgorithm::L2Alsh:
        case MetaAlgorithm::SignAlsh: return d + tail_length;
        case MetaAlgorithm::SimpleLsh:
        case MetaAlgorithm::CrossLsh: return d + 1;
    }
    throw UsageError("unknown algorithm");
}

} // namespace lshmips
