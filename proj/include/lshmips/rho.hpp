#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "lshmips/common.hpp"
#include "lshmips/hash_families.hpp"
#include "lshmips/transforms.hpp"

namespace lshmips {

/// Hash quality rho = log p1 / log p2 for a given target inner product S,
/// approximation ratio c and normalization factor M. Smaller is better:
/// query complexity scales as n^rho log n.
struct RhoResult {
    double rho = 0.0;
    MetaAlgorithm algorithm = MetaAlgorithm::SimpleLsh;
    double target_ip = 0.0; // S
    double ratio = 0.0;     // c
    double max_norm = 0.0;  // M
    /// True when the vanishing tail term ||Ux/M||^(2^(m+1)) was dropped.
    bool tail_ignored = false;
};

namespace detail {

inline void check_condition(double S, double c, double M) {
    if (!(S > 0.0)) throw UsageError("target inner product S must be positive");
    if (!(c > 0.0 && c < 1.0)) throw UsageError("approximation ratio c must be in (0, 1)");
    if (!(M > 0.0)) throw UsageError("normalization factor M must be positive");
    if (S > M) throw UsageError("target inner product S must not exceed M");
}

inline double log_srp_prob(double cosine) { return std::log(collision_prob_srp(cosine)); }

} // namespace detail

/// Quality of the symmetric angular reduction:
/// rho = log(1 - arccos(S/M)/pi) / log(1 - arccos(cS/M)/pi).
inline RhoResult rho_simple(double S, double c, double M) {
    detail::check_condition(S, c, M);
    double rho = detail::log_srp_prob(S / M) / detail::log_srp_prob(c * S / M);
    return {rho, MetaAlgorithm::SimpleLsh, S, c, M, false};
}

/// Quality of the cross-polytope reduction:
/// rho ~= (M + cS)(M - S) / ((M + S)(M - cS)).
inline RhoResult rho_cross(double S, double c, double M) {
    detail::check_condition(S, c, M);
    double rho = ((M + c * S) * (M - S)) / ((M + S) * (M - c * S));
    return {rho, MetaAlgorithm::CrossLsh, S, c, M, false};
}

/// Quality of the sign projection pair with the tail term dropped:
/// rho = log(1 - arccos(2US/(M sqrt(m)))/pi) / log(1 - arccos(2cUS/(M sqrt(m)))/pi).
inline RhoResult rho_signalsh(double S, double c, double M, double U, std::uint32_t m) {
    detail::check_condition(S, c, M);
    if (!(U > 0.0 && U < 1.0)) throw UsageError("shrink factor U must be in (0, 1)");
    if (m < 1) throw UsageError("tail length m must be >= 1");
    double scaled = 2.0 * U * S / (M * std::sqrt(static_cast<double>(m)));
    if (scaled > 1.0 + 1e-12)
        throw UsageError("2US/(M sqrt(m)) exceeds 1; outside the arccos domain");
    scaled = std::min(scaled, 1.0);
    double rho = detail::log_srp_prob(scaled) / detail::log_srp_prob(c * scaled);
    return {rho, MetaAlgorithm::SignAlsh, S, c, M, true};
}

/// Quality of the Euclidean reduction. With ignore_tail the numerator drops
/// the (US/M)^(2^(m+1)) term, the form used for monotonicity scans.
inline RhoResult rho_l2alsh(double S, double c, double M, double U, std::uint32_t m, double r,
                            bool ignore_tail = false) {
    detail::check_condition(S, c, M);
    if (!(U > 0.0 && U < 1.0)) throw UsageError("shrink factor U must be in (0, 1)");
    if (m < 1) throw UsageError("tail length m must be >= 1");
    if (!(r > 0.0)) throw UsageError("bucket width r must be positive");
    double base = 1.0 + static_cast<double>(m) / 4.0;
    double us = U * S / M;
    double tail = ignore_tail ? 0.0 : std::pow(us, std::exp2(static_cast<double>(m + 1)));
    double num_radicand = base - 2.0 * us + tail;
    double den_radicand = base - 2.0 * c * us;
    if (!(num_radicand > 0.0) || !(den_radicand > 0.0))
        throw UsageError("negative radicand in the transformed distance");
    double p1 = collision_prob_l2(r, std::sqrt(num_radicand));
    double p2 = collision_prob_l2(r, std::sqrt(den_radicand));
    double rho = std::log(p1) / std::log(p2);
    return {rho, MetaAlgorithm::L2Alsh, S, c, M, ignore_tail};
}

/// Cross-polytope quality for a (d, c)-Euclidean problem on the unit
/// sphere, c > 1: rho ~= (1/c^2) (4 - c^2 d^2) / (4 - d^2).
inline double cross_rho_generic(double d, double c) {
    if (!(d > 0.0 && d < 2.0)) throw UsageError("distance d must be in (0, 2)");
    if (!(c > 1.0)) throw UsageError("Euclidean approximation ratio c must exceed 1");
    if (!(c * d < 2.0)) throw UsageError("c * d must stay below 2");
    return (1.0 / (c * c)) * (4.0 - c * c * d * d) / (4.0 - d * d);
}

struct EuclideanProblem {
    double distance = 0.0; // d
    double c_euclid = 0.0; // ratio > 1
};

/// Maps an inner-product problem (S, c, M) onto the unit sphere:
/// d = sqrt(2 - 2S/M), c_euclid = sqrt((M - cS)/(M - S)).
inline EuclideanProblem mips_to_euclidean_params(double S, double c, double M) {
    detail::check_condition(S, c, M);
    if (S >= M)
        throw UsageError("degenerate mapping: S = M gives an infinite Euclidean ratio");
    double d = std::sqrt(2.0 - 2.0 * S / M);
    double ce = std::sqrt((M - c * S) / (M - S));
    return {d, ce};
}

/// Three-term bound on the cost ratio between the partitioned search and
/// the unpartitioned one:
///   n^(alpha - rho) / log n + n^(alpha + (1 - alpha) rho* - rho) + n^(beta - alpha rho).
/// Valid only under the stated parameter ranges; every violated condition
/// is reported.
inline double complexity_ratio(double n, double alpha, double beta, double rho, double rho_star) {
    std::string violations;
    auto complain = [&violations](const std::string& msg) {
        if (!violations.empty()) violations += "; ";
        violations += msg;
    };
    if (!(n >= 2.0)) complain("n must be >= 2");
    if (!(rho > 0.0 && rho < 1.0)) complain("rho must be in (0, 1)");
    if (!(rho_star >= 0.0 && rho_star < rho)) complain("rho* must satisfy 0 <= rho* < rho");
    double alpha_cap = std::min(rho, (rho - rho_star) / (1.0 - rho_star));
    if (!(alpha > 0.0 && alpha < alpha_cap))
        complain("alpha must satisfy 0 < alpha < min{rho, (rho - rho*)/(1 - rho*)}");
    if (!(beta > 0.0 && beta < alpha * rho)) complain("beta must satisfy 0 < beta < alpha * rho");
    if (!violations.empty()) throw UsageError("complexity_ratio: " + violations);
    double ln_n = std::log(n);
    return std::pow(n, alpha - rho) / ln_n + std::pow(n, alpha + (1.0 - alpha) * rho_star - rho) +
           std::pow(n, beta - alpha * rho);
}

struct RhoCurveRow {
    MetaAlgorithm algorithm;
    double s_over_m = 0.0;
    double c = 0.0;
    double rho = 0.0;
};

/// Uniform grid over [0.05, 0.95]; the range skirts the boundary
/// singularities at 0 and 1.
inline std::vector<double> default_rho_grid(std::size_t points = 50) {
    std::vector<double> g(points);
    if (points == 1) {
        g[0] = 0.5;
        return g;
    }
    for (std::size_t i = 0; i < points; ++i)
        g[i] = 0.05 + (0.95 - 0.05) * static_cast<double>(i) / static_cast<double>(points - 1);
    return g;
}

/// Tabulates rho for each algorithm over the (c, S/M) grids with M = 1.
/// ALSH entries use the default (U, m, r) settings; grid points outside an
/// algorithm's domain are skipped.
inline std::vector<RhoCurveRow> emit_rho_curves(const std::vector<MetaAlgorithm>& algorithms,
                                                const std::vector<double>& c_grid,
                                                const std::vector<double>& s_over_m_grid) {
    std::vector<RhoCurveRow> rows;
    rows.reserve(algorithms.size() * c_grid.size() * s_over_m_grid.size());
    for (MetaAlgorithm algo : algorithms) {
        for (double s : s_over_m_grid) {
            for (double c : c_grid) {
                double rho = 0.0;
                try {
                    switch (algo) {
                        case MetaAlgorithm::SimpleLsh: rho = rho_simple(s, c, 1.0).rho; break;
                        case MetaAlgorithm::CrossLsh: rho = rho_cross(s, c, 1.0).rho; break;
                        case MetaAlgorithm::SignAlsh: {
                            auto p = default_signalsh_params();
                            rho = rho_signalsh(s, c, 1.0, p.shrink, p.tail_length).rho;
                            break;
                        }
                        case MetaAlgorithm::L2Alsh: {
                            auto p = default_l2alsh_params();
                            rho = rho_l2alsh(s, c, 1.0, p.shrink, p.tail_length, p.bucket_width).rho;
                            break;
                        }
                        default: continue;
                    }
                } catch (const UsageError&) {
                    continue; // outside this algorithm's domain
                }
                rows.push_back({algo, s, c, rho});
            }
        }
    }
    return rows;
}

inline void write_rho_csv(const std::vector<RhoCurveRow>& rows, std::ostream& out) {
    out << "algorithm,S_over_M,c,rho\n";
    for (const auto& r : rows)
        out << algorithm_name(r.algorithm) << ',' << format_g9(r.s_over_m) << ','
            << format_g9(r.c) << ',' << format_g9(r.rho) << '\n';
}

} // namespace lshmips
