#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lshmips/common.hpp"
#include "lshmips/dataset.hpp"
#include "lshmips/index.hpp"

namespace lshmips {

/// Item ids in probe order, truncated at the budget. Items never repeat:
/// each belongs to exactly one bucket of one sub-index.
struct CandidateStream {
    std::vector<std::uint32_t> ids;
    std::uint32_t budget = 0;
    /// Hash-function evaluations spent on the query; code_length with
    /// shared hashes regardless of the number of sub-indexes.
    std::size_t hash_evaluations = 0;
};

namespace detail {

// Per-sub bucket positions grouped by match count, in stored (ascending
// code) order.
inline std::vector<std::vector<std::vector<std::uint32_t>>> group_buckets_by_matches(
    const NormRangeIndex& index, const std::vector<HashCode>& query_codes) {
    const std::uint32_t L = index.config.code_length;
    std::vector<std::vector<std::vector<std::uint32_t>>> by_l(index.subs.size());
    for (std::size_t j = 0; j < index.subs.size(); ++j) {
        by_l[j].resize(L + 1);
        const HashCode& qc = query_codes[index.config.shared_hashes ? 0 : j];
        const auto& buckets = index.subs[j].buckets;
        for (std::uint32_t b = 0; b < buckets.size(); ++b)
            by_l[j][match_count(buckets[b].code, qc)].push_back(b);
    }
    return by_l;
}

struct RankedBucket {
    double score;
    double max_norm;
    std::uint32_t sub;
    std::uint32_t bucket;
};

} // namespace detail

/// Hashes the query once per hash-function set and probes buckets in
/// schedule order. Match-count algorithms walk the precomputed (j, l)
/// classes; cross-polytope ranks every occupied bucket by the
/// residual-based score, which depends on the query's projections and so
/// cannot be presorted. Stops after `budget` distinct items, truncating
/// mid-bucket.
inline CandidateStream generate_candidates(const NormRangeIndex& index,
                                           std::span<const double> query, std::uint32_t budget) {
    if (budget < 1) throw UsageError("candidate budget must be >= 1");
    if (query.size() != index.data_dim)
        throw UsageError("query dimension does not match index");
    CandidateStream stream;
    stream.budget = budget;

    AlshParams params = transform_params(index.config, 1.0);
    std::vector<double> tq;
    transform_query(index.config.algorithm, query, params, tq);

    std::vector<HashCode> query_codes;
    for (const SharedFamily& fam : index.families) {
        query_codes.push_back(hash_transformed(fam, tq));
        stream.hash_evaluations += index.config.code_length;
    }

    auto emit_bucket = [&](const Bucket& b) {
        for (std::uint32_t id : b.items) {
            if (stream.ids.size() >= budget) return false;
            stream.ids.push_back(id);
        }
        return stream.ids.size() < budget;
    };

    if (index.config.algorithm != MetaAlgorithm::CrossLsh) {
        auto by_l = detail::group_buckets_by_matches(index, query_codes);
        for (const ProbeClass& cls : index.schedule) {
            for (std::uint32_t b : by_l[cls.sub][cls.matches])
                if (!emit_bucket(index.subs[cls.sub].buckets[b])) return stream;
        }
        return stream;
    }

    // Cross-polytope: score every occupied bucket against the query's
    // normalized projections. With shared hashes the projections are the
    // same for every sub-index, so compute them once.
    std::vector<detail::RankedBucket> ranked;
    std::vector<std::vector<double>> shared_projections;
    if (index.config.shared_hashes) {
        const auto& fam = std::get<CrossPolytopeFamily>(index.families.front());
        shared_projections.resize(index.config.code_length);
        for (std::uint32_t t = 0; t < index.config.code_length; ++t)
            shared_projections[t] = fam.normalized_projection(tq, t);
    }
    std::vector<std::vector<double>> local_projections;
    for (std::uint32_t j = 0; j < index.subs.size(); ++j) {
        if (!index.config.shared_hashes) {
            const auto& fam = std::get<CrossPolytopeFamily>(index.family_for(j));
            local_projections.assign(index.config.code_length, {});
            for (std::uint32_t t = 0; t < index.config.code_length; ++t)
                local_projections[t] = fam.normalized_projection(tq, t);
        }
        const auto& projections =
            index.config.shared_hashes ? shared_projections : local_projections;
        const SubIndex& sub = index.subs[j];
        for (std::uint32_t b = 0; b < sub.buckets.size(); ++b) {
            double residual = 0.0;
            for (std::uint32_t t = 0; t < index.config.code_length; ++t) {
                std::int32_t sym = sub.buckets[b].code.symbols[t];
                double coord = projections[t][static_cast<std::size_t>(std::abs(sym)) - 1];
                residual += 2.0 - 2.0 * (sym < 0 ? -coord : coord);
            }
            ranked.push_back({cross_bucket_score(sub.max_norm, residual).s_hat, sub.max_norm, j, b});
        }
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const detail::RankedBucket& a, const detail::RankedBucket& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.max_norm != b.max_norm) return a.max_norm > b.max_norm;
                  if (a.sub != b.sub) return a.sub < b.sub;
                  return a.bucket < b.bucket;
              });
    for (const auto& rb : ranked)
        if (!emit_bucket(index.subs[rb.sub].buckets[rb.bucket])) break;
    return stream;
}

struct QueryAnswer {
    std::vector<Neighbor> topk;                       // descending inner product
    std::vector<std::optional<Neighbor>> local_best;  // best verified candidate per sub-dataset
    bool found = false;                               // false when no candidate was produced
};

/// Generates candidates, verifies them with exact inner products against
/// the original vectors, and returns the best k. The global answer is the
/// argmax over the per-sub-dataset local answers by construction.
inline QueryAnswer answer_query(const NormRangeIndex& index, const Dataset& ds,
                                std::span<const double> query, std::uint32_t budget,
                                std::uint32_t k) {
    if (k < 1) throw UsageError("k must be >= 1");
    if (k > budget) throw UsageError("k must not exceed the probe budget");
    if (ds.n != index.dataset_size) throw UsageError("dataset does not match index");
    QueryAnswer answer;
    answer.local_best.resize(index.subs.size());
    CandidateStream stream = generate_candidates(index, query, budget);
    if (stream.ids.empty()) return answer;
    answer.found = true;

    auto better = [](const Neighbor& a, const Neighbor& b) {
        return detail::better_neighbor(a, b);
    };
    std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(better)> heap(better);
    for (std::uint32_t id : stream.ids) {
        Neighbor cand{id, dot(query, ds.row(id))};
        std::uint32_t j = index.sub_of[id];
        if (!answer.local_best[j] || detail::better_neighbor(cand, *answer.local_best[j]))
            answer.local_best[j] = cand;
        if (heap.size() < k) {
            heap.push(cand);
        } else if (detail::better_neighbor(cand, heap.top())) {
            heap.pop();
            heap.push(cand);
        }
    }
    answer.topk.resize(heap.size());
    for (std::size_t r = heap.size(); r-- > 0;) {
        answer.topk[r] = heap.top();
        heap.pop();
    }
    return answer;
}

struct RecallCurve {
    std::vector<std::uint32_t> probed;  // T grid, ascending
    std::vector<double> recall;         // mean over queries at each T
};

/// Logarithmic grid of probe budgets from lo to hi (inclusive, deduplicated).
inline std::vector<std::uint32_t> log_t_grid(std::uint32_t lo, std::uint32_t hi,
                                             std::size_t points = 20) {
    if (lo < 1) lo = 1;
    if (hi < lo) hi = lo;
    std::vector<std::uint32_t> grid;
    for (std::size_t i = 0; i < points; ++i) {
        double f = points == 1 ? 0.0
                               : static_cast<double>(i) / static_cast<double>(points - 1);
        double v = lo * std::pow(static_cast<double>(hi) / lo, f);
        auto t = static_cast<std::uint32_t>(std::llround(v));
        if (grid.empty() || t > grid.back()) grid.push_back(t);
    }
    return grid;
}

/// Fraction of the true top-k found within the first T candidates, averaged
/// over queries, for each T in the grid. Queries may be evaluated on
/// several threads; per-query results are reduced in query order so the
/// output is identical to a single-threaded run.
inline RecallCurve evaluate_recall_curve(const NormRangeIndex& index, const Dataset& ds,
                                         const QuerySet& qs, const GroundTruth& gt,
                                         std::vector<std::uint32_t> t_grid,
                                         std::uint32_t threads = 1) {
    if (gt.per_query.size() != qs.m)
        throw UsageError("ground truth does not match the query set");
    if (qs.d != ds.d) throw UsageError("query dimension does not match dataset");
    if (t_grid.empty()) throw UsageError("empty probe grid");
    std::sort(t_grid.begin(), t_grid.end());
    const std::uint32_t max_t = t_grid.back();
    if (max_t < 1) throw UsageError("probe budgets must be >= 1");

    // hits[qi][ti] = number of true top-k items among the first t_grid[ti]
    // candidates of query qi.
    std::vector<std::vector<std::uint32_t>> hits(qs.m);
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t qi = begin; qi < end; ++qi) {
            std::unordered_set<std::uint32_t> truth;
            for (const Neighbor& nb : gt.per_query[qi]) truth.insert(nb.id);
            CandidateStream stream = generate_candidates(index, qs.row(qi), max_t);
            auto& row = hits[qi];
            row.assign(t_grid.size(), 0);
            std::uint32_t found = 0;
            std::size_t ti = 0;
            for (std::size_t pos = 0; pos < stream.ids.size() && ti < t_grid.size(); ++pos) {
                if (truth.count(stream.ids[pos])) ++found;
                while (ti < t_grid.size() && pos + 1 == t_grid[ti]) {
                    row[ti] = found;
                    ++ti;
                }
            }
            for (; ti < t_grid.size(); ++ti) row[ti] = found;
        }
    };

    if (threads <= 1 || qs.m < 2) {
        run_range(0, qs.m);
    } else {
        std::uint32_t workers = std::min<std::uint32_t>(threads, static_cast<std::uint32_t>(qs.m));
        std::vector<std::thread> pool;
        std::size_t chunk = (qs.m + workers - 1) / workers;
        for (std::uint32_t wkr = 0; wkr < workers; ++wkr) {
            std::size_t begin = wkr * chunk;
            std::size_t end = std::min(qs.m, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    RecallCurve curve;
    curve.probed = t_grid;
    curve.recall.assign(t_grid.size(), 0.0);
    for (std::size_t qi = 0; qi < qs.m; ++qi) {
        std::uint32_t k = static_cast<std::uint32_t>(gt.per_query[qi].size());
        for (std::size_t ti = 0; ti < t_grid.size(); ++ti)
            curve.recall[ti] += k ? static_cast<double>(hits[qi][ti]) / k : 0.0;
    }
    for (double& r : curve.recall) r /= static_cast<double>(qs.m);
    return curve;
}

/// Configuration of the classic multi-table construction: `tables`
/// independent tables, each keyed by the concatenation of
/// `hashes_per_table` fresh hash functions.
struct MultiTableParams {
    MetaAlgorithm algorithm = MetaAlgorithm::SimpleLsh;
    double shrink = 0.83;
    std::uint32_t tail_length = 3;
    double bucket_width = 2.5;
    std::uint32_t cross_dim = 4;
    std::uint32_t hashes_per_table = 4; // K
    std::uint32_t tables = 0;
    std::uint64_t seed = 0;
};

/// Tables needed to reach failure probability delta when one table matches
/// a close pair with probability p1^K: ceil(ln(1/delta) / p1^K).
inline std::uint32_t tables_for_failure_prob(double delta, double p1, std::uint32_t k) {
    if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must be in (0, 1)");
    if (!(p1 > 0.0 && p1 <= 1.0)) throw UsageError("p1 must be in (0, 1]");
    double per_table = std::pow(p1, static_cast<double>(k));
    return static_cast<std::uint32_t>(std::ceil(std::log(1.0 / delta) / per_table));
}

/// Full multi-table lookup: builds `tables` single-shot tables over the
/// dataset and reports whether any retrieved candidate has inner product at
/// least c * S with the query. Zero tables always fail.
inline bool multi_table_cnn(const Dataset& ds, std::span<const double> query, double target_ip,
                            double ratio, const MultiTableParams& mt) {
    if (!(target_ip > 0.0)) throw UsageError("target inner product must be positive");
    if (!(ratio > 0.0 && ratio < 1.0)) throw UsageError("ratio must be in (0, 1)");
    double M = ds.max_norm();
    AlshParams params{mt.shrink, mt.tail_length, mt.bucket_width, M};
    PartitionConfig proto;
    proto.algorithm = mt.algorithm;
    proto.code_length = mt.hashes_per_table;
    proto.bucket_width = mt.bucket_width;
    proto.shrink = mt.shrink;
    proto.tail_length = mt.tail_length;
    proto.cross_dim = mt.cross_dim;

    std::vector<double> tq;
    transform_query(mt.algorithm, query, params, tq);
    std::vector<double> tx;

    double threshold = ratio * target_ip;
    for (std::uint32_t t = 0; t < mt.tables; ++t) {
        SharedFamily fam = sample_family(proto, ds.d, derive_seed(mt.seed, 1000 + t));
        HashCode qcode = hash_transformed(fam, tq);
        for (std::size_t i = 0; i < ds.n; ++i) {
            transform_item(mt.algorithm, ds.row(i), params, tx);
            if (hash_transformed(fam, tx) == qcode &&
                dot(query, ds.row(i)) >= threshold - 1e-12)
                return true;
        }
    }
    return false;
}

} // namespace lshmips
