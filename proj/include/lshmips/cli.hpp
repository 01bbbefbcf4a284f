#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lshmips/bench.hpp"
#include "lshmips/common.hpp"
#include "lshmips/dataset.hpp"
#include "lshmips/index.hpp"
#include "lshmips/index_io.hpp"
#include "lshmips/query.hpp"
#include "lshmips/rho.hpp"
#include "lshmips/synth.hpp"

namespace lshmips::cli {

// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

namespace detail {

inline std::vector<MetaAlgorithm> parse_algorithms(const std::vector<std::string>& names) {
    std::vector<MetaAlgorithm> out;
    for (const auto& n : names) {
        auto a = parse_algorithm(n);
        if (!a) throw UsageError("unknown algorithm: " + n);
        out.push_back(*a);
    }
    return out;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + path);
    return out;
}

inline bool ends_with_csv(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

} // namespace detail

/// Runs the command-line front end. argv excludes the program name.
inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"LSH-based maximum inner product search toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand name
    app.set_config("--config")->description("key = value file; flags take precedence");

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "base random seed")->envname("LSHMIPS_SEED");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    SynthConfig synth_cfg;
    std::string synth_out;
    std::string synth_profile = "lognormal";
    synth->add_option("--out", synth_out, "output dataset path (.fvecs or .csv)")->required();
    synth->add_option("--n", synth_cfg.count, "number of items")->required();
    synth->add_option("--d", synth_cfg.dim, "dimensions")->required();
    synth->add_option("--profile", synth_profile,
                      "norm profile: constant | uniform | lognormal | power-law");
    synth->add_option("--constant-norm", synth_cfg.constant_norm, "norm for the constant profile");
    synth->add_option("--uniform-lo", synth_cfg.uniform_lo, "uniform profile lower bound");
    synth->add_option("--uniform-hi", synth_cfg.uniform_hi, "uniform profile upper bound");
    synth->add_option("--lognormal-mu", synth_cfg.lognormal_mu, "lognormal profile mu");
    synth->add_option("--lognormal-sigma", synth_cfg.lognormal_sigma, "lognormal profile sigma");
    synth->add_option("--pareto-scale", synth_cfg.pareto_scale, "power-law profile scale");
    synth->add_option("--pareto-shape", synth_cfg.pareto_shape, "power-law profile shape");

    // groundtruth
    auto* gtc = app.add_subcommand("groundtruth", "exact top-k by full scan");
    std::string gt_data, gt_queries, gt_out;
    std::uint32_t gt_k = 20;
    gtc->add_option("--data", gt_data, "dataset path")->required();
    gtc->add_option("--queries", gt_queries, "query set path (rows normalized on load)")
        ->required();
    gtc->add_option("--k", gt_k, "neighbors per query");
    gtc->add_option("--out", gt_out, "output CSV path")->required();

    // build
    auto* build = app.add_subcommand("build", "build a norm-range index");
    std::string build_data, build_out, build_algo = "simple-lsh";
    PartitionConfig build_cfg;
    build->add_option("--data", build_data, "dataset path")->required();
    build->add_option("--out", build_out, "output index path")->required();
    build->add_option("--algorithm", build_algo,
                      "l2-alsh | sign-alsh | simple-lsh | cross-lsh");
    build->add_option("--partitions", build_cfg.partitions, "number of sub-datasets (w)");
    build->add_option("--code-length", build_cfg.code_length, "hash functions per item (L)");
    auto* opt_shrink = build->add_option("--shrink", build_cfg.shrink, "ALSH shrink factor U");
    auto* opt_tail = build->add_option("--tail-length", build_cfg.tail_length, "ALSH tail length m");
    auto* opt_width =
        build->add_option("--bucket-width", build_cfg.bucket_width, "Euclidean LSH bucket width r");
    build->add_option("--cross-dim", build_cfg.cross_dim, "cross-polytope output dimension");
    bool build_shared = true;
    build->add_flag("--shared-hashes,!--no-shared-hashes", build_shared,
                    "one hash-function set for all sub-datasets (default on)");

    // query
    auto* queryc = app.add_subcommand("query", "answer queries through an index");
    std::string q_index, q_data, q_queries, q_out;
    std::uint32_t q_budget = 100, q_k = 10;
    queryc->add_option("--index", q_index, "index path")->required();
    queryc->add_option("--data", q_data, "dataset path (for exact verification)")->required();
    queryc->add_option("--queries", q_queries, "query set path")->required();
    queryc->add_option("--budget", q_budget, "candidates to probe (T)");
    queryc->add_option("--k", q_k, "answers per query");
    queryc->add_option("--out", q_out, "output CSV path")->required();

    // bench
    auto* benchc = app.add_subcommand("bench", "probed items vs. recall benchmark");
    BenchConfig bench_cfg;
    std::vector<std::string> bench_algos = {"l2-alsh", "sign-alsh", "simple-lsh", "cross-lsh"};
    std::vector<std::string> bench_variants = {"meta", "norm-range"};
    std::vector<std::uint32_t> bench_grid;
    std::string bench_queries, bench_gt;
    benchc->add_option("--data", bench_cfg.dataset_path, "dataset path")->required();
    benchc->add_option("--queries", bench_queries, "query set path (optional)");
    benchc->add_option("--ground-truth", bench_gt, "precomputed ground truth CSV (optional)");
    benchc->add_option("--algorithms", bench_algos, "algorithms to run")->delimiter(',');
    benchc->add_option("--variants", bench_variants, "meta and/or norm-range")->delimiter(',');
    benchc->add_option("--code-length", bench_cfg.code_length, "meta code length");
    benchc->add_option("--nr-code-length", bench_cfg.nr_code_length,
                       "norm-range code length (0 = paired default)");
    benchc->add_option("--partitions", bench_cfg.partitions, "norm-range sub-datasets (w)");
    benchc->add_option("--k", bench_cfg.k, "ground-truth neighbors per query");
    benchc->add_option("--t-grid", bench_grid, "explicit probe budgets")->delimiter(',');
    benchc->add_option("--threads", bench_cfg.threads, "query evaluation threads");
    benchc->add_option("--num-queries", bench_cfg.num_queries,
                       "synthetic queries when --queries is absent");
    benchc->add_option("--cross-dim", bench_cfg.cross_dim, "cross-polytope output dimension");
    bool bench_shared = true;
    benchc->add_flag("--shared-hashes,!--no-shared-hashes", bench_shared,
                     "one hash-function set for all sub-datasets (default on)");
    benchc->add_option("--out", bench_cfg.output_path, "recall CSV path")->required();

    // rho
    auto* rhoc = app.add_subcommand("rho", "tabulate theoretical hash quality");
    std::vector<std::string> rho_algos = {"simple-lsh", "cross-lsh"};
    std::size_t rho_points = 50;
    std::string rho_out;
    rhoc->add_option("--algorithms", rho_algos, "algorithms to tabulate")->delimiter(',');
    rhoc->add_option("--grid-points", rho_points, "points per axis");
    rhoc->add_option("--out", rho_out, "output CSV path")->required();

    // normhist
    auto* nh = app.add_subcommand("normhist", "norm histogram of a dataset");
    std::string nh_data, nh_out;
    std::size_t nh_bins = 50;
    bool nh_no_scale = false;
    nh->add_option("--data", nh_data, "dataset path")->required();
    nh->add_option("--bins", nh_bins, "number of bins");
    nh->add_flag("--no-scale", nh_no_scale, "keep raw norms instead of scaling the max to 1");
    nh->add_option("--out", nh_out, "output CSV path")->required();

    std::vector<std::string> args(argv.rbegin(), argv.rend()); // CLI11 wants reversed args
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (synth->parsed()) {
            auto profile = parse_norm_profile(synth_profile);
            if (!profile) throw UsageError("invalid norm profile: " + synth_profile);
            synth_cfg.profile = *profile;
            synth_cfg.seed = seed;
            Dataset ds = synth_dataset(synth_cfg);
            if (detail::ends_with_csv(synth_out))
                save_csv(ds, synth_out);
            else
                save_fvecs(ds, synth_out);
            out << "wrote " << ds.n << " x " << ds.d << " dataset to " << synth_out << "\n";
        } else if (gtc->parsed()) {
            Dataset ds = load_dataset_auto(gt_data);
            QuerySet qs = make_queryset(load_dataset_auto(gt_queries));
            GroundTruth gt = brute_force_topk(ds, qs, gt_k);
            save_ground_truth(gt, gt_out);
            out << "wrote ground truth for " << qs.m << " queries to " << gt_out << "\n";
        } else if (build->parsed()) {
            auto algo = parse_algorithm(build_algo);
            if (!algo) throw UsageError("unknown algorithm: " + build_algo);
            Dataset ds = load_dataset_auto(build_data);
            PartitionConfig cfg = make_partition_config(*algo, build_cfg.partitions,
                                                        build_cfg.code_length, seed);
            if (opt_shrink->count()) cfg.shrink = build_cfg.shrink;
            if (opt_tail->count()) cfg.tail_length = build_cfg.tail_length;
            if (opt_width->count()) cfg.bucket_width = build_cfg.bucket_width;
            cfg.cross_dim = build_cfg.cross_dim;
            cfg.shared_hashes = build_shared;
            NormRangeIndex index = build_index(ds, cfg);
            save_index(index, build_out);
            out << "built " << algorithm_name(cfg.algorithm) << " index: " << cfg.partitions
                << " sub-datasets, " << index.total_buckets() << " buckets, L="
                << cfg.code_length << ", wrote " << build_out << "\n";
        } else if (queryc->parsed()) {
            NormRangeIndex index = load_index(q_index);
            Dataset ds = load_dataset_auto(q_data);
            if (ds.n != index.dataset_size || ds.d != index.data_dim)
                throw DataError("dataset does not match the index");
            QuerySet qs = make_queryset(load_dataset_auto(q_queries));
            auto csv = detail::open_output(q_out);
            csv << "query_id,rank,item_id,inner_product\n";
            for (std::size_t qi = 0; qi < qs.m; ++qi) {
                QueryAnswer ans = answer_query(index, ds, qs.row(qi), q_budget, q_k);
                for (std::size_t r = 0; r < ans.topk.size(); ++r)
                    csv << qi << ',' << (r + 1) << ',' << ans.topk[r].id << ','
                        << format_g9(ans.topk[r].inner_product) << '\n';
            }
            out << "answered " << qs.m << " queries into " << q_out << "\n";
        } else if (benchc->parsed()) {
            bench_cfg.algorithms = detail::parse_algorithms(bench_algos);
            bench_cfg.run_meta = false;
            bench_cfg.run_norm_range = false;
            for (const auto& v : bench_variants) {
                if (v == "meta")
                    bench_cfg.run_meta = true;
                else if (v == "norm-range")
                    bench_cfg.run_norm_range = true;
                else
                    throw UsageError("unknown variant: " + v);
            }
            if (!bench_queries.empty()) bench_cfg.queries_path = bench_queries;
            if (!bench_gt.empty()) bench_cfg.ground_truth_path = bench_gt;
            bench_cfg.t_grid = bench_grid;
            bench_cfg.seed = seed;
            bench_cfg.shared_hashes = bench_shared;
            BenchResult result = run_bench(bench_cfg);
            write_bench_summary(result, out);
            out << "wrote " << result.rows.size() << " recall rows to " << bench_cfg.output_path
                << "\n";
        } else if (rhoc->parsed()) {
            auto algos = detail::parse_algorithms(rho_algos);
            auto grid = default_rho_grid(rho_points);
            auto rows = emit_rho_curves(algos, grid, grid);
            auto csv = detail::open_output(rho_out);
            write_rho_csv(rows, csv);
            out << "wrote " << rows.size() << " rho rows to " << rho_out << "\n";
        } else if (nh->parsed()) {
            Dataset ds = load_dataset_auto(nh_data);
            auto bins = norm_histogram(ds, nh_bins, !nh_no_scale);
            auto csv = detail::open_output(nh_out);
            csv << "bin_center,count\n";
            for (const auto& b : bins) csv << format_g9(b.center) << ',' << b.count << '\n';
            out << "wrote " << bins.size() << " bins to " << nh_out << "\n";
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}

inline int run_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

} // namespace lshmips::cli
