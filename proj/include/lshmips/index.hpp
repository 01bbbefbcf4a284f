#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <variant>
#include <vector>

#include "lshmips/common.hpp"
#include "lshmips/dataset.hpp"
#include "lshmips/hash_families.hpp"
#include "lshmips/rng.hpp"
#include "lshmips/transforms.hpp"

namespace lshmips {

// Stream tags for deriving independent sub-seeds from one index seed.
inline constexpr std::uint64_t kPartitionStream = 1;
inline constexpr std::uint64_t kFamilyStream = 2;

struct PartitionConfig {
    MetaAlgorithm algorithm = MetaAlgorithm::SimpleLsh;
    std::uint32_t partitions = 1;  // w
    std::uint32_t code_length = 16; // L, hash functions shared by all sub-indexes
    std::uint64_t seed = 0;
    double shrink = 0.83;          // U (ALSH pair)
    std::uint32_t tail_length = 3; // m (ALSH pair)
    double bucket_width = 2.5;     // r (Euclidean LSH)
    std::uint32_t cross_dim = 4;   // D' (cross-polytope)
    /// One hash-function set shared by every sub-index; the query is hashed
    /// code_length times total. Off builds independent functions per
    /// sub-index instead.
    bool shared_hashes = true;

    void validate(std::size_t n) const {
        if (partitions < 1) throw UsageError("partitions must be >= 1");
        if (partitions > n) throw UsageError("more partitions than items");
        if (code_length < 1) throw UsageError("code length must be >= 1");
        if (algorithm == MetaAlgorithm::L2Alsh || algorithm == MetaAlgorithm::SignAlsh) {
            if (!(shrink > 0.0 && shrink < 1.0)) throw UsageError("shrink factor U must be in (0, 1)");
            if (tail_length < 1) throw UsageError("tail length m must be >= 1");
        }
        if (algorithm == MetaAlgorithm::L2Alsh && !(bucket_width > 0.0))
            throw UsageError("bucket width r must be positive");
        if (algorithm == MetaAlgorithm::CrossLsh && cross_dim < 1)
            throw UsageError("cross-polytope output dimension must be >= 1");
    }
};

/// Config with the per-algorithm recommended transformation parameters.
inline PartitionConfig make_partition_config(MetaAlgorithm algo, std::uint32_t partitions,
                                             std::uint32_t code_length, std::uint64_t seed) {
    PartitionConfig cfg;
    cfg.algorithm = algo;
    cfg.partitions = partitions;
    cfg.code_length = code_length;
    cfg.seed = seed;
    if (algo == MetaAlgorithm::L2Alsh) {
        cfg.shrink = 0.83;
        cfg.tail_length = 3;
        cfg.bucket_width = 2.5;
    } else if (algo == MetaAlgorithm::SignAlsh) {
        cfg.shrink = 0.75;
        cfg.tail_length = 2;
    }
    return cfg;
}

struct PartitionResult {
    std::vector<std::vector<std::uint32_t>> members; // per part, ascending norm rank
    std::vector<double> max_norms;                   // M_j, nondecreasing
};

/// Splits items into w contiguous norm-percentile groups. Items are ranked
/// by ascending norm with ties broken by a seeded shuffle; the first
/// (n mod w) groups take one extra item. The last group holds the largest
/// norms, so max_norms.back() is the dataset maximum.
inline PartitionResult partition_by_norm(const Dataset& ds, std::uint32_t w, std::uint64_t seed) {
    if (w < 1) throw UsageError("partitions must be >= 1");
    if (w > ds.n) throw UsageError("more partitions than items");
    std::vector<std::uint64_t> shuffle_key(ds.n);
    SeededRng rng(derive_seed(seed, kPartitionStream));
    for (auto& k : shuffle_key) k = rng.next_u64();
    std::vector<std::uint32_t> order(ds.n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (ds.norms[a] != ds.norms[b]) return ds.norms[a] < ds.norms[b];
        if (shuffle_key[a] != shuffle_key[b]) return shuffle_key[a] < shuffle_key[b];
        return a < b;
    });
    PartitionResult out;
    out.members.resize(w);
    out.max_norms.resize(w);
    std::size_t base = ds.n / w;
    std::size_t extra = ds.n % w;
    std::size_t pos = 0;
    for (std::uint32_t j = 0; j < w; ++j) {
        std::size_t size = base + (j < extra ? 1 : 0);
        auto& part = out.members[j];
        part.assign(order.begin() + pos, order.begin() + pos + size);
        double mj = 0.0;
        for (auto id : part) mj = std::max(mj, ds.norms[id]);
        out.max_norms[j] = mj;
        pos += size;
    }
    return out;
}

using SharedFamily = std::variant<L2HashFamily, SrpFamily, CrossPolytopeFamily>;

inline SharedFamily sample_family(const PartitionConfig& cfg, std::size_t data_dim,
                                  std::uint64_t family_seed) {
    std::size_t tdim = transformed_dim(cfg.algorithm, data_dim, cfg.tail_length);
    switch (cfg.algorithm) {
        case MetaAlgorithm::L2Alsh:
            return L2HashFamily(family_seed, cfg.code_length, tdim, cfg.bucket_width);
        case MetaAlgorithm::SignAlsh:
        case MetaAlgorithm::SimpleLsh:
            return SrpFamily(family_seed, cfg.code_length, tdim);
        case MetaAlgorithm::CrossLsh:
            return CrossPolytopeFamily(family_seed, cfg.code_length, tdim, cfg.cross_dim);
    }
    throw UsageError("unknown algorithm");
}

inline HashCode hash_transformed(const SharedFamily& fam, std::span<const double> v) {
    return std::visit([&](const auto& f) { return f.hash(v); }, fam);
}

struct Bucket {
    HashCode code;
    std::vector<std::uint32_t> items; // ascending id
};

struct SubIndex {
    double max_norm = 0.0;                  // M_j
    std::vector<std::uint32_t> member_ids;  // ascending norm rank
    std::vector<Bucket> buckets;            // ascending code order

    const Bucket* find(const HashCode& code) const {
        auto it = std::lower_bound(buckets.begin(), buckets.end(), code,
                                   [](const Bucket& b, const HashCode& c) { return b.code < c; });
        if (it != buckets.end() && it->code == code) return &*it;
        return nullptr;
    }
};

struct BucketScore {
    double s_hat = 0.0;
    /// Set when an empirical match fraction of 0 or 1 forced the collision
    /// probability inversion to clamp.
    bool saturated = false;
};

/// Solves 4 / (4 d^2 - d^4) - 1 = 1 / residual for d^2 on [0, 2] by
/// bisection; the left side is strictly decreasing there so the root is
/// unique.
inline double solve_cross_distance_sq(double residual) {
    if (residual < 0.0) throw UsageError("cross-polytope residual must be nonnegative");
    if (residual == 0.0) return 0.0; // limit: perfect alignment
    auto f = [&](double u) { return 4.0 / (u * (4.0 - u)) - 1.0 - 1.0 / residual; };
    double lo = 0.0; // f -> +inf
    double hi = 2.0; // f(2) = -1/residual < 0
    for (int it = 0; it < 90; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Inner-product estimate for a bucket from sub-dataset with max norm M_j
/// whose code agrees with the query on `matches` of `code_length` symbols.
/// Inverts each family's collision probability at the empirical match rate.
inline BucketScore bucket_score(MetaAlgorithm algo, double sub_max_norm, std::uint32_t matches,
                                std::uint32_t code_length, const AlshParams& params) {
    if (code_length < 1) throw UsageError("code length must be >= 1");
    if (matches > code_length) throw UsageError("match count exceeds code length");
    double rate = static_cast<double>(matches) / static_cast<double>(code_length);
    switch (algo) {
        case MetaAlgorithm::SimpleLsh:
            return {sub_max_norm * std::cos(3.14159265358979323846 * (1.0 - rate)), false};
        case MetaAlgorithm::SignAlsh: {
            double scale = sub_max_norm * std::sqrt(static_cast<double>(params.tail_length)) /
                           (2.0 * params.shrink);
            return {scale * std::cos(3.14159265358979323846 * (1.0 - rate)), false};
        }
        case MetaAlgorithm::L2Alsh: {
            auto inv = invert_collision_l2(params.bucket_width, rate);
            double base = 1.0 + static_cast<double>(params.tail_length) / 4.0;
            double s = sub_max_norm / (2.0 * params.shrink) *
                       (base - inv.distance * inv.distance);
            return {s, inv.saturated};
        }
        case MetaAlgorithm::CrossLsh:
            throw UsageError("cross-polytope buckets are scored from residuals, not match counts");
    }
    throw UsageError("unknown algorithm");
}

/// Inner-product estimate for a cross-polytope bucket with aggregate
/// residual Y: solve the distance equation, then s_hat = M_j (1 - d^2/2).
inline BucketScore cross_bucket_score(double sub_max_norm, double residual) {
    double dsq = solve_cross_distance_sq(residual);
    return {sub_max_norm * (1.0 - 0.5 * dsq), false};
}

/// One (sub-dataset, match-count) class of the precomputed probe order.
struct ProbeClass {
    double score = 0.0;      // s_hat shared by every bucket in the class
    std::uint32_t sub = 0;   // j
    std::uint32_t matches = 0; // l
};

/// All (j, l) classes sorted by descending score. Ties prefer the larger
/// sub-dataset max norm, then the larger match count, then the smaller j.
inline std::vector<ProbeClass> build_probe_schedule(std::span<const double> sub_max_norms,
                                                    std::uint32_t code_length, MetaAlgorithm algo,
                                                    const AlshParams& params) {
    std::vector<ProbeClass> schedule;
    schedule.reserve(sub_max_norms.size() * (code_length + 1));
    for (std::uint32_t j = 0; j < sub_max_norms.size(); ++j) {
        AlshParams local = params;
        local.max_norm = sub_max_norms[j];
        for (std::uint32_t l = 0; l <= code_length; ++l) {
            auto sc = bucket_score(algo, sub_max_norms[j], l, code_length, local);
            schedule.push_back({sc.s_hat, j, l});
        }
    }
    std::sort(schedule.begin(), schedule.end(), [&](const ProbeClass& a, const ProbeClass& b) {
        if (a.score != b.score) return a.score > b.score;
        if (sub_max_norms[a.sub] != sub_max_norms[b.sub])
            return sub_max_norms[a.sub] > sub_max_norms[b.sub];
        if (a.matches != b.matches) return a.matches > b.matches;
        return a.sub < b.sub;
    });
    return schedule;
}

/// Norm-range partitioned hash index: w sub-indexes over norm-percentile
/// groups, each hashed under its own normalization factor M_j. With shared
/// hashes one function set serves every sub-index, so one hashed query
/// signature probes them all. The probe schedule ranks (j, l) classes by
/// estimated inner product; cross-polytope indexes rank buckets per query
/// from residuals instead and keep the schedule empty.
struct NormRangeIndex {
    PartitionConfig config;
    std::size_t dataset_size = 0;
    std::size_t data_dim = 0;
    std::vector<SharedFamily> families; // size 1 (shared) or w (independent)
    std::vector<SubIndex> subs;
    std::vector<ProbeClass> schedule;
    std::vector<std::uint32_t> sub_of; // item id -> sub-index position

    const SharedFamily& family_for(std::uint32_t j) const {
        return config.shared_hashes ? families.front() : families[j];
    }

    std::size_t total_buckets() const {
        std::size_t b = 0;
        for (const auto& s : subs) b += s.buckets.size();
        return b;
    }
};

inline AlshParams transform_params(const PartitionConfig& cfg, double max_norm) {
    return AlshParams{cfg.shrink, cfg.tail_length, cfg.bucket_width, max_norm};
}

inline std::uint64_t family_seed_for(const PartitionConfig& cfg, std::uint32_t j) {
    return derive_seed(cfg.seed, kFamilyStream + (cfg.shared_hashes ? 0 : j));
}

/// Builds the index: partition by norm, sample the hash functions from the
/// seed, hash every item under its group's transformation, and precompute
/// the probe schedule. Deterministic given (dataset, config).
inline NormRangeIndex build_index(const Dataset& ds, const PartitionConfig& cfg) {
    cfg.validate(ds.n);
    NormRangeIndex index;
    index.config = cfg;
    index.dataset_size = ds.n;
    index.data_dim = ds.d;

    auto parts = partition_by_norm(ds, cfg.partitions, cfg.seed);
    std::size_t family_count = cfg.shared_hashes ? 1 : cfg.partitions;
    index.families.reserve(family_count);
    for (std::uint32_t f = 0; f < family_count; ++f)
        index.families.push_back(sample_family(cfg, ds.d, family_seed_for(cfg, f)));

    index.subs.resize(cfg.partitions);
    index.sub_of.assign(ds.n, 0);
    std::vector<double> transformed;
    for (std::uint32_t j = 0; j < cfg.partitions; ++j) {
        SubIndex& sub = index.subs[j];
        sub.max_norm = parts.max_norms[j];
        sub.member_ids = std::move(parts.members[j]);
        AlshParams params = transform_params(cfg, sub.max_norm);
        const SharedFamily& fam = index.family_for(j);
        std::vector<std::pair<HashCode, std::uint32_t>> coded;
        coded.reserve(sub.member_ids.size());
        for (std::uint32_t id : sub.member_ids) {
            assert(ds.norms[id] <= sub.max_norm * (1.0 + 1e-12));
            index.sub_of[id] = j;
            transform_item(cfg.algorithm, ds.row(id), params, transformed);
            coded.emplace_back(hash_transformed(fam, transformed), id);
        }
        std::sort(coded.begin(), coded.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return a.second < b.second;
        });
        for (auto& [code, id] : coded) {
            if (sub.buckets.empty() || !(sub.buckets.back().code == code)) {
                sub.buckets.push_back(Bucket{std::move(code), {}});
            }
            sub.buckets.back().items.push_back(id);
        }
    }

    if (cfg.algorithm != MetaAlgorithm::CrossLsh) {
        std::vector<double> max_norms(cfg.partitions);
        for (std::uint32_t j = 0; j < cfg.partitions; ++j) max_norms[j] = index.subs[j].max_norm;
        index.schedule = build_probe_schedule(max_norms, cfg.code_length, cfg.algorithm,
                                              transform_params(cfg, 0.0));
    }
    return index;
}

} // namespace lshmips
