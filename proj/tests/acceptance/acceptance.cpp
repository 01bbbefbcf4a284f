// Acceptance suite: one numbered end-to-end check per library guarantee,
// each printed as a single pass/fail line. Run with no arguments for the
// full battery or with a number to run one check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lshmips/lshmips.hpp"
#include "../test_util.hpp"

using namespace lshmips;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

std::string fmt_sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2e", v);
    return buf;
}

std::vector<double> random_unit(std::size_t dim, SeededRng& rng) {
    std::vector<double> q(dim);
    double n = 0.0;
    do {
        for (auto& v : q) v = rng.gaussian();
        n = euclidean_norm(q);
    } while (n < 1e-12);
    for (auto& v : q) v /= n;
    return q;
}

std::vector<double> random_in_ball(std::size_t dim, double max_norm, SeededRng& rng) {
    auto x = random_unit(dim, rng);
    double target = max_norm * std::pow(rng.uniform01(), 1.0 / dim);
    for (auto& v : x) v *= target;
    return x;
}

// ---------------------------------------------------------------- 1 ----

Outcome transform_identities() {
    Outcome out;
    SeededRng rng(1001);
    const std::size_t dim = 24;
    const double M = 1.6;
    const int pairs = 10000;
    double worst = 0.0;

    AlshParams l2p = default_l2alsh_params(M);
    AlshParams sgp = default_signalsh_params(M);
    for (int i = 0; i < pairs; ++i) {
        auto x = random_in_ball(dim, M, rng);
        auto q = random_unit(dim, rng);
        double scaled = 0.0;

        // Euclidean reduction distance identity
        auto px = l2alsh_item(x, l2p);
        auto qq = l2alsh_query(q, l2p);
        double lhs = 0.0;
        for (std::size_t j = 0; j < px.size(); ++j) lhs += (px[j] - qq[j]) * (px[j] - qq[j]);
        scaled = l2p.shrink / M;
        double tail = std::pow(scaled * scaled * squared_norm(x), std::exp2(l2p.tail_length));
        double rhs = 1.0 + l2p.tail_length / 4.0 - 2.0 * scaled * dot(x, q) + tail;
        worst = std::max(worst, std::abs(lhs - rhs));

        // angular reduction cosine identity
        auto sx = signalsh_item(x, sgp);
        auto sq = signalsh_query(q, sgp);
        double cos_lhs = dot(sx, sq) / (euclidean_norm(sx) * euclidean_norm(sq));
        scaled = sgp.shrink / M;
        tail = std::pow(scaled * scaled * squared_norm(x), std::exp2(sgp.tail_length));
        double cos_rhs = scaled * dot(x, q) / std::sqrt(sgp.tail_length / 4.0 + tail);
        worst = std::max(worst, std::abs(cos_lhs - cos_rhs));

        // symmetric reduction inner-product identity
        auto ux = simple_transform(x, M);
        auto uq = simple_query(q);
        worst = std::max(worst, std::abs(dot(ux, uq) - dot(x, q) / M));
    }
    out.pass = worst <= 1e-9;
    out.detail = "worst identity error " + fmt_sci(worst) + " over 1e4 pairs per algorithm";
    return out;
}

// ---------------------------------------------------------------- 2 ----

Outcome collision_fidelity() {
    Outcome out;
    const std::size_t functions = 100000;
    const std::size_t dim = 8;
    std::ostringstream detail;
    double worst_sigmas = 0.0;

    // angular: ten cosine levels
    {
        SeededRng rng(2002);
        SrpFamily fam(20021, functions, dim);
        for (double target : {-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9}) {
            auto x = random_unit(dim, rng);
            auto perp = random_unit(dim, rng);
            double pr = dot(perp, x);
            for (std::size_t j = 0; j < dim; ++j) perp[j] -= pr * x[j];
            double np = euclidean_norm(perp);
            for (auto& v : perp) v /= np;
            double s = std::sqrt(1.0 - target * target);
            std::vector<double> y(dim);
            for (std::size_t j = 0; j < dim; ++j) y[j] = target * x[j] + s * perp[j];

            double expected = collision_prob_srp(dot(x, y));
            double rate = match_count(fam.hash(x), fam.hash(y)) / static_cast<double>(functions);
            double se = std::sqrt(expected * (1.0 - expected) / functions);
            worst_sigmas = std::max(worst_sigmas, std::abs(rate - expected) / se);
        }
    }

    // Euclidean: ten distance levels at r = 2.5
    {
        SeededRng rng(2003);
        const double r = 2.5;
        L2HashFamily fam(20032, functions, dim, r);
        for (double d : {0.3, 0.6, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.5}) {
            std::vector<double> x(dim), y(dim);
            for (auto& v : x) v = rng.gaussian();
            auto dir = random_unit(dim, rng);
            for (std::size_t j = 0; j < dim; ++j) y[j] = x[j] + dir[j] * d;
            double expected = collision_prob_l2(r, d);
            double rate = match_count(fam.hash(x), fam.hash(y)) / static_cast<double>(functions);
            double se = std::sqrt(expected * (1.0 - expected) / functions);
            worst_sigmas = std::max(worst_sigmas, std::abs(rate - expected) / se);
        }
    }

    out.pass = worst_sigmas <= 3.0;
    out.detail = "worst deviation " + fmt(worst_sigmas, 2) + " standard errors (limit 3)";
    return out;
}

// ---------------------------------------------------------------- 3 ----

Outcome rho_suite() {
    Outcome out;
    std::ostringstream why;

    // (a) parameter mapping composed with the generic quality reproduces
    // the closed form
    SeededRng rng(3001);
    double worst_compose = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double M = rng.uniform(0.5, 4.0);
        double S = rng.uniform(0.02, 0.98) * M;
        double c = rng.uniform(0.02, 0.98);
        auto ep = mips_to_euclidean_params(S, c, M);
        double composed = cross_rho_generic(ep.distance, ep.c_euclid);
        worst_compose = std::max(worst_compose, std::abs(composed - rho_cross(S, c, M).rho));
    }
    if (worst_compose > 1e-9) {
        out.pass = false;
        why << "composition error " << fmt_sci(worst_compose) << "; ";
    }

    // (b) strict growth in the normalization factor on a 50 x 50 x 10 grid;
    // the sign pair needs 2US/(M sqrt(m)) <= 1 so its ratio grid stops at 0.9
    auto ratio_grid = default_rho_grid(50);
    auto c_grid = default_rho_grid(50);
    std::vector<double> Ms;
    for (int i = 0; i < 10; ++i) Ms.push_back(1.0 + 0.4 * i);
    long violations = 0;
    auto scan = [&](auto&& rho_of, const std::vector<double>& ratios) {
        for (double s_ratio : ratios) {
            for (double c : c_grid) {
                double S = s_ratio * Ms.front();
                double prev = rho_of(S, c, Ms.front());
                for (std::size_t mi = 1; mi < Ms.size(); ++mi) {
                    double cur = rho_of(S, c, Ms[mi]);
                    if (!(cur > prev)) ++violations;
                    prev = cur;
                }
            }
        }
    };
    std::vector<double> sign_ratios;
    for (double v : ratio_grid) sign_ratios.push_back(std::min(v, 0.90));
    scan([](double S, double c, double M) { return rho_simple(S, c, M).rho; }, ratio_grid);
    scan([](double S, double c, double M) { return rho_cross(S, c, M).rho; }, ratio_grid);
    scan([](double S, double c, double M) { return rho_signalsh(S, c, M, 0.75, 2).rho; },
         sign_ratios);
    scan([](double S, double c, double M) { return rho_l2alsh(S, c, M, 0.83, 3, 2.5, true).rho; },
         ratio_grid);
    if (violations) {
        out.pass = false;
        why << violations << " monotonicity violations; ";
    }

    // (c) cross below simple everywhere on the default grid
    long dominance = 0;
    for (double s : ratio_grid)
        for (double c : c_grid)
            if (!(rho_cross(s, c, 1.0).rho < rho_simple(s, c, 1.0).rho)) ++dominance;
    if (dominance) {
        out.pass = false;
        why << dominance << " dominance violations; ";
    }

    out.detail = out.pass ? "composition error " + fmt_sci(worst_compose) +
                                ", 100k monotonicity points, 2500 dominance points"
                          : why.str();
    return out;
}

// ---------------------------------------------------------------- 4 ----

Outcome cross_score_algebra() {
    Outcome out;
    SeededRng rng(4001);
    double worst_root = 0.0, worst_back = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double y = rng.uniform(0.1, 1000.0);
        double dsq = solve_cross_distance_sq(y);
        worst_root = std::max(worst_root, std::abs(dsq - (2.0 - 2.0 / std::sqrt(y + 1.0))));
        double back = 4.0 / (4.0 * dsq - dsq * dsq) - 1.0;
        worst_back = std::max(worst_back, std::abs(back - 1.0 / y));
    }
    out.pass = worst_root <= 1e-9 && worst_back <= 1e-9;
    out.detail = "worst root error " + fmt_sci(worst_root) + ", worst residual error " +
                 fmt_sci(worst_back);
    return out;
}

// ---------------------------------------------------------------- 5 ----

Outcome multi_table_guarantee() {
    Outcome out;
    const double S = 0.8, c = 0.5, delta = 0.1;
    const std::size_t dim = 16, n_distractors = 298;
    const int trials = 200;
    std::ostringstream detail;

    // single-hash collision probability for the planted pair, per algorithm
    auto planted_p = [&](MetaAlgorithm algo) {
        switch (algo) {
            case MetaAlgorithm::SimpleLsh: return collision_prob_srp(S);
            case MetaAlgorithm::SignAlsh: {
                double U = 0.75;
                int m = 2;
                double tail = std::pow(U * S, std::exp2(m + 1));
                return collision_prob_srp(U * S / std::sqrt(m / 4.0 + tail));
            }
            case MetaAlgorithm::L2Alsh: {
                double U = 0.83;
                int m = 3;
                double tail = std::pow(U * S, std::exp2(m + 1));
                return collision_prob_l2(2.5, std::sqrt(1.0 + m / 4.0 - 2.0 * U * S + tail));
            }
            case MetaAlgorithm::CrossLsh: {
                // no closed form: Monte-Carlo over fresh one-function
                // families at the transformed distance, minus two standard
                // errors so the table count stays conservative
                double d = std::sqrt(2.0 - 2.0 * S);
                const std::size_t samples = 30000;
                SeededRng rng(5005);
                std::size_t hits = 0;
                for (std::size_t s = 0; s < samples; ++s) {
                    auto x = random_unit(dim + 1, rng);
                    auto dir = random_unit(dim + 1, rng);
                    double pr = dot(dir, x);
                    for (std::size_t j = 0; j <= dim; ++j) dir[j] -= pr * x[j];
                    double nd = euclidean_norm(dir);
                    double cos_t = 1.0 - d * d / 2.0;
                    double sin_t = std::sqrt(1.0 - cos_t * cos_t);
                    std::vector<double> y(dim + 1);
                    for (std::size_t j = 0; j <= dim; ++j)
                        y[j] = cos_t * x[j] + sin_t * dir[j] / nd;
                    CrossPolytopeFamily fam(derive_seed(5100, s), 1, dim + 1, 4);
                    if (fam.hash(x) == fam.hash(y)) ++hits;
                }
                double p = static_cast<double>(hits) / samples;
                return p - 2.0 * std::sqrt(p * (1.0 - p) / samples);
            }
        }
        return 0.5;
    };
    auto far_p = [&](MetaAlgorithm algo) {
        switch (algo) {
            case MetaAlgorithm::SimpleLsh: return collision_prob_srp(c * S);
            case MetaAlgorithm::SignAlsh:
                return collision_prob_srp(0.75 * c * S / std::sqrt(2.0 / 4.0));
            case MetaAlgorithm::L2Alsh:
                return collision_prob_l2(2.5, std::sqrt(1.0 + 3.0 / 4.0 - 2.0 * 0.83 * c * S));
            case MetaAlgorithm::CrossLsh: {
                double d = std::sqrt(2.0 - 2.0 * c * S);
                // coarse estimate reusing the analytic angular form as an
                // upper-bound proxy only to pick K; correctness does not
                // depend on it
                return std::max(0.02, collision_prob_srp(1.0 - d * d / 2.0) / 3.0);
            }
        }
        return 0.3;
    };

    bool all_pass = true;
    for (MetaAlgorithm algo : {MetaAlgorithm::L2Alsh, MetaAlgorithm::SignAlsh,
                               MetaAlgorithm::SimpleLsh, MetaAlgorithm::CrossLsh}) {
        double p1 = planted_p(algo);
        double p2 = far_p(algo);
        std::uint32_t K = std::max<std::uint32_t>(
            1, static_cast<std::uint32_t>(
                   std::lround(std::log(static_cast<double>(n_distractors + 2)) /
                               std::log(1.0 / p2))));
        std::uint32_t tables = tables_for_failure_prob(delta, p1, K);

        int successes = 0;
        for (int t = 0; t < trials; ++t) {
            SeededRng rng(derive_seed(50000 + t, static_cast<std::uint64_t>(algo)));
            auto q = random_unit(dim, rng);
            std::vector<double> values;
            // planted S-neighbor along the query direction
            for (double v : q) values.push_back(v * S);
            // unit-norm anchor with small inner product pins M = 1
            {
                auto dir = random_unit(dim, rng);
                double pr = dot(dir, q);
                for (std::size_t j = 0; j < dim; ++j) dir[j] -= pr * q[j];
                double nd = euclidean_norm(dir);
                double u = rng.uniform(0.0, 0.3);
                double s = std::sqrt(1.0 - u * u);
                for (std::size_t j = 0; j < dim; ++j)
                    values.push_back(u * q[j] + s * dir[j] / nd);
            }
            // distractors with inner product at most 0.35 < cS = 0.4
            for (std::size_t i = 0; i < n_distractors; ++i) {
                auto dir = random_unit(dim, rng);
                double pr = dot(dir, q);
                for (std::size_t j = 0; j < dim; ++j) dir[j] -= pr * q[j];
                double nd = euclidean_norm(dir);
                double nrm = rng.uniform(0.4, 0.98);
                double u = rng.uniform(-0.35, 0.35);
                double s = std::sqrt(nrm * nrm - u * u);
                for (std::size_t j = 0; j < dim; ++j)
                    values.push_back(u * q[j] + s * dir[j] / nd);
            }
            Dataset ds = make_dataset(std::move(values), n_distractors + 2, dim);

            MultiTableParams mt;
            mt.algorithm = algo;
            if (algo == MetaAlgorithm::L2Alsh) {
                mt.shrink = 0.83;
                mt.tail_length = 3;
            } else if (algo == MetaAlgorithm::SignAlsh) {
                mt.shrink = 0.75;
                mt.tail_length = 2;
            }
            mt.cross_dim = 4;
            mt.hashes_per_table = K;
            mt.tables = tables;
            mt.seed = derive_seed(60000 + t, static_cast<std::uint64_t>(algo));
            if (multi_table_cnn(ds, q, S, c, mt)) ++successes;
        }
        double rate = static_cast<double>(successes) / trials;
        double threshold = (1.0 - delta) - 3.0 * std::sqrt(delta * (1.0 - delta) / trials);
        bool pass = rate >= threshold;
        all_pass = all_pass && pass;
        detail << algorithm_name(algo) << " " << fmt(rate, 3) << " (K=" << K << ",T=" << tables
               << ") ";
    }
    out.pass = all_pass;
    out.detail = detail.str() + "threshold " + fmt(0.9 - 3.0 * std::sqrt(0.09 / trials), 4);
    return out;
}

// ---------------------------------------------------------------- 6 ----

Outcome oracle_equivalence() {
    Outcome out;
    SeededRng rng(6001);
    long mismatches = 0;
    for (int instance = 0; instance < 20; ++instance) {
        SynthConfig scfg;
        scfg.count = 50 + rng.next_u64() % 951; // up to 1000 items
        scfg.dim = 4 + rng.next_u64() % 29;
        scfg.profile = instance % 2 ? NormProfile::Lognormal : NormProfile::Uniform;
        scfg.seed = derive_seed(6002, instance);
        Dataset ds = synth_dataset(scfg);
        std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.next_u64() % 20);
        k = std::min<std::uint32_t>(k, static_cast<std::uint32_t>(ds.n));
        QuerySet qs = synth_queries(3, scfg.dim, derive_seed(6003, instance));
        GroundTruth gt = brute_force_topk(ds, qs, k);

        for (MetaAlgorithm algo : {MetaAlgorithm::L2Alsh, MetaAlgorithm::SignAlsh,
                                   MetaAlgorithm::SimpleLsh, MetaAlgorithm::CrossLsh}) {
            for (std::uint32_t w : {1u, 8u}) {
                PartitionConfig cfg = make_partition_config(
                    algo, std::min<std::uint32_t>(w, static_cast<std::uint32_t>(ds.n)), 8,
                    derive_seed(6004, instance));
                NormRangeIndex index = build_index(ds, cfg);
                for (std::size_t qi = 0; qi < qs.m; ++qi) {
                    QueryAnswer ans = answer_query(index, ds, qs.row(qi),
                                                   static_cast<std::uint32_t>(ds.n), k);
                    if (ans.topk.size() != k) {
                        ++mismatches;
                        continue;
                    }
                    for (std::uint32_t r = 0; r < k; ++r) {
                        if (ans.topk[r].id != gt.per_query[qi][r].id ||
                            ans.topk[r].inner_product != gt.per_query[qi][r].inner_product)
                            ++mismatches;
                    }
                }
            }
        }
    }
    out.pass = mismatches == 0;
    out.detail = mismatches == 0
                     ? "20 instances x 4 algorithms x {meta, norm-range} all equal brute force"
                     : std::to_string(mismatches) + " mismatches";
    return out;
}

// ------------------------------------------------------------- 7, 8 ----

struct CurvePair {
    std::vector<double> meta;
    std::vector<double> norm_range;
};

std::map<std::string, CurvePair> paired_curves(const Dataset& ds, const QuerySet& qs,
                                               const GroundTruth& gt,
                                               const std::vector<MetaAlgorithm>& algos,
                                               std::uint32_t meta_L, std::uint32_t nr_L,
                                               std::uint32_t w,
                                               const std::vector<std::uint32_t>& grid,
                                               std::uint64_t seed) {
    std::map<std::string, CurvePair> out;
    for (MetaAlgorithm algo : algos) {
        CurvePair pair;
        PartitionConfig meta_cfg = make_partition_config(algo, 1, meta_L, seed);
        pair.meta = evaluate_recall_curve(build_index(ds, meta_cfg), ds, qs, gt, grid, 2).recall;
        PartitionConfig nr_cfg = make_partition_config(algo, w, nr_L, seed);
        pair.norm_range =
            evaluate_recall_curve(build_index(ds, nr_cfg), ds, qs, gt, grid, 2).recall;
        out[algorithm_name(algo)] = pair;
    }
    return out;
}

Outcome norm_range_catalyst() {
    Outcome out;
    const std::vector<MetaAlgorithm> algos = {MetaAlgorithm::L2Alsh, MetaAlgorithm::SignAlsh,
                                              MetaAlgorithm::SimpleLsh, MetaAlgorithm::CrossLsh};
    const std::vector<std::uint32_t> grid = log_t_grid(100, 10000, 10);
    const int seeds = 5;
    std::map<std::string, CurvePair> sums;
    for (MetaAlgorithm algo : algos)
        sums[algorithm_name(algo)] = {std::vector<double>(grid.size(), 0.0),
                                      std::vector<double>(grid.size(), 0.0)};

    for (int s = 0; s < seeds; ++s) {
        SynthConfig scfg;
        scfg.count = 50000;
        scfg.dim = 64;
        scfg.profile = NormProfile::Lognormal;
        // sigma 0.3 puts the bulk of the norms near a quarter of the
        // maximum, the heterogeneity regime of typical embedding datasets
        scfg.lognormal_sigma = 0.3;
        scfg.seed = derive_seed(7001, s);
        Dataset ds = synth_dataset(scfg);
        QuerySet qs = synth_queries(200, 64, derive_seed(7002, s));
        GroundTruth gt = brute_force_topk(ds, qs, 20);
        auto curves = paired_curves(ds, qs, gt, algos, 32, 26, 64, grid, derive_seed(7003, s));
        for (auto& [name, pair] : curves) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                sums[name].meta[i] += pair.meta[i] / seeds;
                sums[name].norm_range[i] += pair.norm_range[i] / seeds;
            }
        }
    }

    std::ostringstream detail;
    bool all_pass = true;
    for (auto& [name, pair] : sums) {
        int strict = 0;
        bool floor_ok = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (pair.norm_range[i] > pair.meta[i]) ++strict;
            if (pair.norm_range[i] < pair.meta[i] - 0.02) floor_ok = false;
        }
        bool gated = name != "cross-lsh"; // measured and reported, not gated
        bool pass = floor_ok && strict >= 7;
        if (gated) all_pass = all_pass && pass;
        detail << name << (gated ? "" : " (ungated)") << ": " << strict << "/10 strict wins, "
               << "floor " << (floor_ok ? "ok" : "violated") << "; ";
    }
    out.pass = all_pass;
    out.detail = detail.str();
    return out;
}

Outcome degenerate_norm_sanity() {
    Outcome out;
    SynthConfig scfg;
    scfg.count = 20000;
    scfg.dim = 32;
    scfg.profile = NormProfile::Constant;
    scfg.seed = 8001;
    Dataset ds = synth_dataset(scfg);
    QuerySet qs = synth_queries(400, 32, 8002);
    GroundTruth gt = brute_force_topk(ds, qs, 10);
    const std::vector<MetaAlgorithm> algos = {MetaAlgorithm::L2Alsh, MetaAlgorithm::SignAlsh,
                                              MetaAlgorithm::SimpleLsh, MetaAlgorithm::CrossLsh};
    auto grid = log_t_grid(50, 20000, 10);
    // same code length on both sides isolates the partition effect
    auto curves = paired_curves(ds, qs, gt, algos, 16, 16, 8, grid, 8003);

    std::ostringstream detail;
    bool all_pass = true;
    for (auto& [name, pair] : curves) {
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            worst = std::max(worst, std::abs(pair.norm_range[i] - pair.meta[i]));
        bool pass = worst <= 0.03;
        all_pass = all_pass && pass;
        detail << name << " max gap " << fmt(worst, 4) << "; ";
    }
    out.pass = all_pass;
    out.detail = detail.str() + "(limit 0.03)";
    return out;
}

// ---------------------------------------------------------------- 9 ----

Outcome determinism() {
    Outcome out;
    lshmips::test::TempDir tmp;
    auto data = tmp.file("data.fvecs");
    SynthConfig scfg;
    scfg.count = 2000;
    scfg.dim = 12;
    scfg.seed = 9001;
    save_fvecs(synth_dataset(scfg), data);

    BenchConfig cfg;
    cfg.dataset_path = data;
    cfg.code_length = 12;
    cfg.partitions = 8;
    cfg.k = 10;
    cfg.seed = 99;
    cfg.num_queries = 40;
    cfg.threads = 2;
    cfg.output_path = tmp.file("r1.csv");
    run_bench(cfg);
    cfg.output_path = tmp.file("r2.csv");
    run_bench(cfg);
    bool csv_equal = lshmips::test::slurp_text(tmp.file("r1.csv")) ==
                     lshmips::test::slurp_text(tmp.file("r2.csv"));

    // serialized indexes must be byte-stable across build / load / build
    Dataset ds = load_fvecs(data);
    bool bytes_stable = true;
    for (MetaAlgorithm algo : {MetaAlgorithm::L2Alsh, MetaAlgorithm::SignAlsh,
                               MetaAlgorithm::SimpleLsh, MetaAlgorithm::CrossLsh}) {
        PartitionConfig pc = make_partition_config(algo, 8, 12, 90210);
        auto first = serialize_index(build_index(ds, pc));
        auto reloaded = deserialize_index(first.data(), first.size());
        auto second = serialize_index(reloaded);
        auto rebuilt = serialize_index(build_index(ds, pc));
        bytes_stable = bytes_stable && first == second && first == rebuilt;
    }

    out.pass = csv_equal && bytes_stable;
    out.detail = std::string("bench CSVs ") + (csv_equal ? "identical" : "differ") +
                 ", index bytes " + (bytes_stable ? "stable" : "unstable");
    return out;
}

// --------------------------------------------------------------- 10 ----

Outcome complexity_bound() {
    Outcome out;
    SeededRng rng(10001);
    long violations = 0;
    for (int i = 0; i < 100; ++i) {
        double rho = rng.uniform(0.1, 0.9);
        double rho_star = rng.uniform(0.0, rho * 0.95);
        double cap = std::min(rho, (rho - rho_star) / (1.0 - rho_star));
        double alpha = rng.uniform(0.05, 0.95) * cap;
        double beta = rng.uniform(0.05, 0.95) * alpha * rho;
        double prev = complexity_ratio(1e2, alpha, beta, rho, rho_star);
        for (double n : {1e4, 1e6, 1e8}) {
            double cur = complexity_ratio(n, alpha, beta, rho, rho_star);
            if (!(cur < prev)) ++violations;
            prev = cur;
        }
    }
    out.pass = violations == 0;
    out.detail = violations == 0 ? "strictly decreasing over {1e2, 1e4, 1e6, 1e8} for 100 tuples"
                                 : std::to_string(violations) + " violations";
    return out;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds; // 0 = no stated budget
    std::function<Outcome()> fn;
};

const std::vector<Criterion> kCriteria = {
    {1, "transform identities", 5.0, transform_identities},
    {2, "collision-probability fidelity", 60.0, collision_fidelity},
    {3, "rho suite", 10.0, rho_suite},
    {4, "cross-polytope score algebra", 0.0, cross_score_algebra},
    {5, "multi-table retrieval guarantee", 300.0, multi_table_guarantee},
    {6, "exhaustive-budget oracle equivalence", 0.0, oracle_equivalence},
    {7, "norm-range catalyst effect", 900.0, norm_range_catalyst},
    {8, "degenerate-norm sanity", 0.0, degenerate_norm_sanity},
    {9, "pipeline determinism", 0.0, determinism},
    {10, "complexity-ratio bound", 0.0, complexity_bound},
};

} // namespace

int main(int argc, char** argv) {
    int selected = 0;
    if (argc > 1) selected = std::atoi(argv[1]);
    int failures = 0;
    for (const auto& criterion : kCriteria) {
        if (selected && criterion.id != selected) continue;
        auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.fn();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();
        bool in_budget = criterion.budget_seconds == 0.0 || seconds < criterion.budget_seconds;
        bool pass = outcome.pass && in_budget;
        if (!pass) ++failures;
        std::printf("[%s] criterion %d: %s (%.1fs%s) - %s\n", pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name, seconds,
                    in_budget ? "" : ", OVER BUDGET", outcome.detail.c_str());
    }
    return failures;
}
