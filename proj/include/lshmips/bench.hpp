#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lshmips/common.hpp"
#include "lshmips/dataset.hpp"
#include "lshmips/index.hpp"
#include "lshmips/query.hpp"
#include "lshmips/synth.hpp"

namespace lshmips {

/// Paired norm-range code length for a meta code length; the pairs keep the
/// two variants' bucket counts, and so their memory footprints, comparable.
inline std::uint32_t paired_code_length(std::uint32_t meta_code_length) {
    switch (meta_code_length) {
        case 16: return 11;
        case 32: return 26;
        case 64: return 57;
        default: return meta_code_length;
    }
}

struct BenchConfig {
    std::string dataset_path;                 // .fvecs or .csv
    std::optional<std::string> queries_path;  // defaults to synthetic unit queries
    std::optional<std::string> ground_truth_path; // defaults to exact recomputation
    std::vector<MetaAlgorithm> algorithms = {MetaAlgorithm::L2Alsh, MetaAlgorithm::SignAlsh,
                                             MetaAlgorithm::SimpleLsh, MetaAlgorithm::CrossLsh};
    bool run_meta = true;
    bool run_norm_range = true;
    std::uint32_t code_length = 32;       // meta variant L
    std::uint32_t nr_code_length = 0;     // norm-range L; 0 selects the paired default
    std::uint32_t partitions = 64;        // w for the norm-range variant
    std::uint32_t k = 20;
    std::vector<std::uint32_t> t_grid;    // empty selects log grid from k to n
    std::uint64_t seed = 0;
    std::uint32_t threads = 1;
    std::uint32_t num_queries = 100;      // used when queries_path is empty
    std::uint32_t cross_dim = 4;
    bool shared_hashes = true;
    std::string output_path;              // recall CSV

    void validate() const {
        std::string problems;
        auto complain = [&problems](const std::string& m) {
            if (!problems.empty()) problems += "; ";
            problems += m;
        };
        if (dataset_path.empty()) complain("dataset path is required");
        if (algorithms.empty()) complain("at least one algorithm is required");
        if (!run_meta && !run_norm_range) complain("at least one variant is required");
        if (code_length < 1) complain("code length must be >= 1");
        if (partitions < 1) complain("partitions must be >= 1");
        if (k < 1) complain("k must be >= 1");
        if (!queries_path && num_queries < 1) complain("num-queries must be >= 1");
        if (!problems.empty()) throw UsageError("bench config: " + problems);
    }
};

struct RecallRow {
    std::string algorithm;
    std::string variant; // "meta" or "norm-range"
    std::uint32_t code_length = 0;
    std::uint32_t partitions = 0;
    std::uint32_t k = 0;
    std::uint32_t probed = 0;
    double recall = 0.0;
};

struct BenchVariantStats {
    std::string algorithm;
    std::string variant;
    std::uint32_t code_length = 0;
    std::uint32_t partitions = 0;
    std::size_t buckets = 0;
    double build_seconds = 0.0;
    double query_seconds = 0.0;
};

struct BenchResult {
    std::vector<RecallRow> rows;
    std::vector<BenchVariantStats> stats;
};

inline void write_recall_csv(const std::vector<RecallRow>& rows, std::ostream& out) {
    out << "algorithm,variant,code_length,partitions,k,T,recall\n";
    for (const auto& r : rows)
        out << r.algorithm << ',' << r.variant << ',' << r.code_length << ',' << r.partitions
            << ',' << r.k << ',' << r.probed << ',' << format_g9(r.recall) << '\n';
}

/// Loads a dataset by file extension; anything that is not .csv is treated
/// as fvecs.
inline Dataset load_dataset_auto(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return load_csv(path);
    return load_fvecs(path);
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace detail

/// Runs the probed-items/recall protocol for every requested (algorithm,
/// variant) pair on one dataset. The norm-range variant uses `partitions`
/// sub-datasets and the (possibly shorter) paired code length; the meta
/// variant is the same algorithm with a single partition.
inline BenchResult run_bench(const BenchConfig& cfg) {
    cfg.validate();
    BenchResult result;
    Dataset ds = load_dataset_auto(cfg.dataset_path);

    QuerySet qs;
    if (cfg.queries_path) {
        qs = make_queryset(load_dataset_auto(*cfg.queries_path));
    } else {
        // stream tag far away from the per-sub family streams
        qs = synth_queries(cfg.num_queries, ds.d, derive_seed(cfg.seed, 0x5bc1e5));
    }
    if (qs.d != ds.d) throw DataError("query dimension does not match dataset");

    GroundTruth gt;
    if (cfg.ground_truth_path) {
        gt = load_ground_truth(*cfg.ground_truth_path);
        if (gt.per_query.size() != qs.m)
            throw DataError("ground truth query count does not match the query set");
    } else {
        gt = brute_force_topk(ds, qs, cfg.k);
    }

    std::vector<std::uint32_t> grid = cfg.t_grid;
    if (grid.empty()) grid = log_t_grid(cfg.k, static_cast<std::uint32_t>(ds.n), 20);

    std::uint32_t nr_code = cfg.nr_code_length ? cfg.nr_code_length
                                               : paired_code_length(cfg.code_length);

    struct Variant {
        const char* name;
        std::uint32_t partitions;
        std::uint32_t code_length;
    };
    std::vector<Variant> variants;
    if (cfg.run_meta) variants.push_back({"meta", 1, cfg.code_length});
    if (cfg.run_norm_range) variants.push_back({"norm-range", cfg.partitions, nr_code});

    for (MetaAlgorithm algo : cfg.algorithms) {
        for (const Variant& var : variants) {
            PartitionConfig pc = make_partition_config(algo, var.partitions, var.code_length,
                                                       cfg.seed);
            pc.cross_dim = cfg.cross_dim;
            pc.shared_hashes = cfg.shared_hashes;
            auto t0 = std::chrono::steady_clock::now();
            NormRangeIndex index = build_index(ds, pc);
            double build_s = detail::seconds_since(t0);

            t0 = std::chrono::steady_clock::now();
            RecallCurve curve = evaluate_recall_curve(index, ds, qs, gt, grid, cfg.threads);
            double query_s = detail::seconds_since(t0);

            for (std::size_t i = 0; i < curve.probed.size(); ++i)
                result.rows.push_back({algorithm_name(algo), var.name, var.code_length,
                                       var.partitions, cfg.k, curve.probed[i], curve.recall[i]});
            result.stats.push_back({algorithm_name(algo), var.name, var.code_length,
                                    var.partitions, index.total_buckets(), build_s, query_s});
        }
    }

    if (!cfg.output_path.empty()) {
        std::ofstream out(cfg.output_path, std::ios::trunc);
        if (!out) throw DataError("cannot open file for writing: " + cfg.output_path);
        write_recall_csv(result.rows, out);
        if (!out) throw DataError("write failure on file: " + cfg.output_path);
    }
    return result;
}

/// Human-readable run summary: wall times and bucket counts per variant.
/// Bucket counts let the memory parity of a meta/norm-range pairing be
/// checked directly.
inline void write_bench_summary(const BenchResult& result, std::ostream& out) {
    out << "algorithm        variant     L    w    buckets    build_s    query_s\n";
    for (const auto& s : result.stats) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-16s %-11s %-4u %-4u %-10zu %-10.3f %-10.3f\n",
                      s.algorithm.c_str(), s.variant.c_str(), s.code_length, s.partitions,
                      s.buckets, s.build_seconds, s.query_seconds);
        out << line;
    }
}

} // namespace lshmips
