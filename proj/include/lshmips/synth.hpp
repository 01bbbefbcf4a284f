#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lshmips/common.hpp"
#include "lshmips/dataset.hpp"
#include "lshmips/rng.hpp"

namespace lshmips {

/// Norm profile of a synthetic dataset; directions are always uniform on
/// the sphere.
enum class NormProfile {
    Constant,
    Uniform,
    Lognormal,
    PowerLaw,
};

inline const char* norm_profile_name(NormProfile p) {
    switch (p) {
        case NormProfile::Constant: return "constant";
        case NormProfile::Uniform: return "uniform";
        case NormProfile::Lognormal: return "lognormal";
        case NormProfile::PowerLaw: return "power-law";
    }
    return "unknown";
}

inline std::optional<NormProfile> parse_norm_profile(std::string_view name) {
    if (name == "constant") return NormProfile::Constant;
    if (name == "uniform") return NormProfile::Uniform;
    if (name == "lognormal") return NormProfile::Lognormal;
    if (name == "power-law" || name == "powerlaw") return NormProfile::PowerLaw;
    return std::nullopt;
}

struct SynthConfig {
    std::size_t count = 1000;
    std::size_t dim = 16;
    NormProfile profile = NormProfile::Lognormal;
    std::uint64_t seed = 0;
    double constant_norm = 1.0;   // constant profile
    double uniform_lo = 0.1;      // uniform profile
    double uniform_hi = 1.0;
    double lognormal_mu = 0.0;    // lognormal profile
    double lognormal_sigma = 0.3;
    double pareto_scale = 0.1;    // power-law profile
    double pareto_shape = 2.5;
};

namespace detail {

inline double sample_norm(const SynthConfig& cfg, SeededRng& rng) {
    switch (cfg.profile) {
        case NormProfile::Constant: return cfg.constant_norm;
        case NormProfile::Uniform: return rng.uniform(cfg.uniform_lo, cfg.uniform_hi);
        case NormProfile::Lognormal:
            return std::exp(cfg.lognormal_mu + cfg.lognormal_sigma * rng.gaussian());
        case NormProfile::PowerLaw: {
            // Pareto via inverse CDF, capped to keep outliers finite.
            double u = rng.uniform01();
            double v = cfg.pareto_scale / std::pow(1.0 - u, 1.0 / cfg.pareto_shape);
            return std::min(v, cfg.pareto_scale * 1e4);
        }
    }
    throw UsageError("unknown norm profile");
}

} // namespace detail

/// Reproducible synthetic dataset: uniform random directions scaled to the
/// configured norm profile. Values are rounded through float32 so a file
/// round trip is bit-exact.
inline Dataset synth_dataset(const SynthConfig& cfg) {
    if (cfg.count < 1 || cfg.dim < 1) throw UsageError("synthetic dataset needs count, dim >= 1");
    SeededRng rng(cfg.seed);
    std::vector<double> values(cfg.count * cfg.dim);
    std::vector<double> direction(cfg.dim);
    for (std::size_t i = 0; i < cfg.count; ++i) {
        double nrm2 = 0.0;
        do {
            nrm2 = 0.0;
            for (std::size_t j = 0; j < cfg.dim; ++j) {
                direction[j] = rng.gaussian();
                nrm2 += direction[j] * direction[j];
            }
        } while (nrm2 == 0.0);
        double scale = detail::sample_norm(cfg, rng) / std::sqrt(nrm2);
        for (std::size_t j = 0; j < cfg.dim; ++j)
            values[i * cfg.dim + j] =
                static_cast<double>(static_cast<float>(direction[j] * scale));
    }
    return make_dataset(std::move(values), cfg.count, cfg.dim);
}

/// Fresh unit-norm query vectors with uniform random directions.
inline QuerySet synth_queries(std::size_t count, std::size_t dim, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.count = count;
    cfg.dim = dim;
    cfg.profile = NormProfile::Constant;
    cfg.constant_norm = 1.0;
    cfg.seed = seed;
    return make_queryset(synth_dataset(cfg));
}

} // namespace lshmips
