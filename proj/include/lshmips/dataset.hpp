#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "lshmips/common.hpp"
#include "lshmips/vec.hpp"

namespace lshmips {

/// Immutable in-memory collection of dense vectors with cached Euclidean
/// norms. Safe for concurrent reads once loaded.
struct Dataset {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> items;      // row-major, n * d
    std::vector<double> norms;      // per-item Euclidean norm
    std::vector<std::uint32_t> ids; // stable identifiers, 0..n-1 after load

    std::span<const double> row(std::size_t i) const {
        return {items.data() + i * d, d};
    }

    double max_norm() const {
        double m = 0.0;
        for (double v : norms) m = std::max(m, v);
        return m;
    }
};

/// Query vectors, normalized to unit Euclidean norm on construction.
struct QuerySet {
    std::size_t m = 0;
    std::size_t d = 0;
    std::vector<double> queries; // row-major, m * d, unit rows

    std::span<const double> row(std::size_t i) const {
        return {queries.data() + i * d, d};
    }
};

struct Neighbor {
    std::uint32_t id = 0;
    double inner_product = 0.0;
};

/// Exact top-k answers per query, inner products non-increasing.
struct GroundTruth {
    std::uint32_t k = 0;
    std::vector<std::vector<Neighbor>> per_query;
};

namespace detail {

inline std::uint32_t read_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline float read_f32_le(const unsigned char* p) {
    std::uint32_t bits = read_u32_le(p);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

inline std::vector<unsigned char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    auto size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
    if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw DataError("read failure on file: " + path);
    return bytes;
}

} // namespace detail

/// Builds a dataset from row-major values, computing norms and identifiers.
inline Dataset make_dataset(std::vector<double> values, std::size_t n, std::size_t d) {
    if (n < 1 || d < 1) throw DataError("dataset must have n >= 1 and d >= 1");
    if (values.size() != n * d) throw DataError("dataset value count does not match n * d");
    for (double v : values)
        if (!std::isfinite(v)) throw DataError("dataset contains a non-finite value");
    Dataset ds;
    ds.n = n;
    ds.d = d;
    ds.items = std::move(values);
    ds.norms.resize(n);
    ds.ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.norms[i] = euclidean_norm(ds.row(i));
        ds.ids[i] = static_cast<std::uint32_t>(i);
    }
    return ds;
}

/// Loads the fvecs layout: per record a little-endian int32 dimension
/// followed by that many little-endian float32 values.
inline Dataset load_fvecs(const std::string& path) {
    auto bytes = detail::slurp(path);
    std::vector<double> values;
    std::size_t n = 0, d = 0;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        if (bytes.size() - pos < 4)
            throw DataError("malformed record length at byte offset " + std::to_string(pos) +
                            " in " + path);
        std::uint32_t rec_d = detail::read_u32_le(bytes.data() + pos);
        if (rec_d == 0 || rec_d > (1u << 28))
            throw DataError("implausible record dimension at byte offset " + std::to_string(pos) +
                            " in " + path);
        if (n == 0) {
            d = rec_d;
        } else if (rec_d != d) {
            throw DataError("inconsistent record dimension at byte offset " + std::to_string(pos) +
                            " in " + path);
        }
        pos += 4;
        if (bytes.size() - pos < 4 * static_cast<std::size_t>(rec_d))
            throw DataError("malformed record length at byte offset " + std::to_string(pos) +
                            " in " + path);
        for (std::uint32_t j = 0; j < rec_d; ++j) {
            float f = detail::read_f32_le(bytes.data() + pos);
            if (!std::isfinite(f))
                throw DataError("non-finite value at byte offset " + std::to_string(pos) + " in " +
                                path);
            values.push_back(static_cast<double>(f));
            pos += 4;
        }
        ++n;
    }
    if (n == 0) throw DataError("empty dataset: " + path);
    return make_dataset(std::move(values), n, d);
}

/// Writes the fvecs layout; values are narrowed to float32.
inline void save_fvecs(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + path);
    std::uint32_t d32 = static_cast<std::uint32_t>(ds.d);
    for (std::size_t i = 0; i < ds.n; ++i) {
        unsigned char hdr[4] = {static_cast<unsigned char>(d32 & 0xff),
                                static_cast<unsigned char>((d32 >> 8) & 0xff),
                                static_cast<unsigned char>((d32 >> 16) & 0xff),
                                static_cast<unsigned char>((d32 >> 24) & 0xff)};
        out.write(reinterpret_cast<const char*>(hdr), 4);
        for (std::size_t j = 0; j < ds.d; ++j) {
            float f = static_cast<float>(ds.items[i * ds.d + j]);
            std::uint32_t bits;
            std::memcpy(&bits, &f, sizeof(bits));
            unsigned char b[4] = {static_cast<unsigned char>(bits & 0xff),
                                  static_cast<unsigned char>((bits >> 8) & 0xff),
                                  static_cast<unsigned char>((bits >> 16) & 0xff),
                                  static_cast<unsigned char>((bits >> 24) & 0xff)};
            out.write(reinterpret_cast<const char*>(b), 4);
        }
    }
    if (!out) throw DataError("write failure on file: " + path);
}

/// Loads comma-separated decimal floats, one vector per line.
inline Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    std::vector<double> values;
    std::size_t n = 0, d = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t cols = 0;
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            double v = std::strtod(p, &end);
            if (end == p)
                throw DataError("unparsable token on line " + std::to_string(line_no) + " in " +
                                path);
            if (!std::isfinite(v))
                throw DataError("non-finite value on line " + std::to_string(line_no) + " in " +
                                path);
            values.push_back(v);
            ++cols;
            while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
            if (*end == '\0') break;
            if (*end != ',')
                throw DataError("unparsable token on line " + std::to_string(line_no) + " in " +
                                path);
            p = end + 1;
        }
        if (n == 0) {
            d = cols;
        } else if (cols != d) {
            throw DataError("ragged row on line " + std::to_string(line_no) + " in " + path);
        }
        ++n;
    }
    if (n == 0) throw DataError("empty dataset: " + path);
    return make_dataset(std::move(values), n, d);
}

/// Writes one comma-separated vector per line with 9 significant digits.
inline void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + path);
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (std::size_t j = 0; j < ds.d; ++j) {
            if (j) out << ',';
            out << format_g9(ds.items[i * ds.d + j]);
        }
        out << '\n';
    }
    if (!out) throw DataError("write failure on file: " + path);
}

/// Normalizes every row of a dataset into a query set. Zero rows are
/// rejected because they carry no direction.
inline QuerySet make_queryset(const Dataset& ds) {
    QuerySet qs;
    qs.m = ds.n;
    qs.d = ds.d;
    qs.queries.resize(ds.n * ds.d);
    for (std::size_t i = 0; i < ds.n; ++i) {
        double nrm = ds.norms[i];
        if (nrm <= 0.0)
            throw DataError("zero-norm query at row " + std::to_string(i));
        for (std::size_t j = 0; j < ds.d; ++j)
            qs.queries[i * ds.d + j] = ds.items[i * ds.d + j] / nrm;
    }
    return qs;
}

struct HistogramBin {
    double center = 0.0;
    std::size_t count = 0;
};

/// Histogram of item norms over uniform bins spanning [0, max]. With
/// scale_to_unit the norms are divided by the maximum first, so the top of
/// the range is exactly 1.
inline std::vector<HistogramBin> norm_histogram(const Dataset& ds, std::size_t bins,
                                                bool scale_to_unit = true) {
    if (bins < 1) throw UsageError("norm_histogram requires bins >= 1");
    double max = ds.max_norm();
    double hi = scale_to_unit ? 1.0 : (max > 0.0 ? max : 1.0);
    double width = hi / static_cast<double>(bins);
    std::vector<HistogramBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b)
        out[b].center = (static_cast<double>(b) + 0.5) * width;
    for (double nrm : ds.norms) {
        double v = scale_to_unit ? (max > 0.0 ? nrm / max : 0.0) : nrm;
        auto idx = static_cast<std::size_t>(v / width);
        if (idx >= bins) idx = bins - 1;
        ++out[idx].count;
    }
    return out;
}

namespace detail {

// Ordering used for exact answers: higher inner product first, ties to the
// smaller identifier so results do not depend on traversal order.
inline bool better_neighbor(const Neighbor& a, const Neighbor& b) {
    if (a.inner_product != b.inner_product) return a.inner_product > b.inner_product;
    return a.id < b.id;
}

} // namespace detail

/// Exact top-k inner products by full scan; the reference answer for every
/// approximate method in the library.
inline GroundTruth brute_force_topk(const Dataset& ds, const QuerySet& qs, std::uint32_t k) {
    if (k < 1) throw UsageError("brute_force_topk requires k >= 1");
    if (k > ds.n) throw UsageError("brute_force_topk requires k <= dataset size");
    if (qs.d != ds.d) throw UsageError("query dimension does not match dataset dimension");
    GroundTruth gt;
    gt.k = k;
    gt.per_query.resize(qs.m);
    auto worse = [](const Neighbor& a, const Neighbor& b) { return detail::better_neighbor(a, b); };
    for (std::size_t qi = 0; qi < qs.m; ++qi) {
        // min-heap on the "better" ordering keeps the current k best on top.
        std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(worse)> heap(worse);
        auto q = qs.row(qi);
        for (std::size_t i = 0; i < ds.n; ++i) {
            Neighbor cand{static_cast<std::uint32_t>(i), dot(q, ds.row(i))};
            if (heap.size() < k) {
                heap.push(cand);
            } else if (detail::better_neighbor(cand, heap.top())) {
                heap.pop();
                heap.push(cand);
            }
        }
        std::vector<Neighbor>& out = gt.per_query[qi];
        out.resize(heap.size());
        for (std::size_t r = heap.size(); r-- > 0;) {
            out[r] = heap.top();
            heap.pop();
        }
    }
    return gt;
}

/// Persists ground truth as CSV rows `query_id,rank,item_id,inner_product`
/// with rank starting at 1.
inline void save_ground_truth(const GroundTruth& gt, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out << "query_id,rank,item_id,inner_product\n";
    for (std::size_t qi = 0; qi < gt.per_query.size(); ++qi) {
        const auto& lst = gt.per_query[qi];
        for (std::size_t r = 0; r < lst.size(); ++r) {
            out << qi << ',' << (r + 1) << ',' << lst[r].id << ','
                << format_g9(lst[r].inner_product) << '\n';
        }
    }
    if (!out) throw DataError("write failure on file: " + path);
}

inline GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    GroundTruth gt;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("query_id", 0) == 0) continue;
        std::istringstream ss(line);
        std::string tok;
        std::uint64_t fields[3];
        for (int f = 0; f < 3; ++f) {
            if (!std::getline(ss, tok, ','))
                throw DataError("short ground-truth row on line " + std::to_string(line_no));
            char* end = nullptr;
            fields[f] = std::strtoull(tok.c_str(), &end, 10);
            if (end == tok.c_str())
                throw DataError("unparsable ground-truth field on line " +
                                std::to_string(line_no));
        }
        if (!std::getline(ss, tok))
            throw DataError("short ground-truth row on line " + std::to_string(line_no));
        double ip = std::strtod(tok.c_str(), nullptr);
        std::size_t qi = fields[0];
        if (gt.per_query.size() <= qi) gt.per_query.resize(qi + 1);
        auto& lst = gt.per_query[qi];
        if (fields[1] != lst.size() + 1)
            throw DataError("non-contiguous rank on line " + std::to_string(line_no));
        if (!lst.empty() && lst.back().inner_product < ip)
            throw DataError("inner products not non-increasing on line " + std::to_string(line_no));
        auto id = static_cast<std::uint32_t>(fields[2]);
        for (const Neighbor& nb : lst)
            if (nb.id == id)
                throw DataError("duplicate item id on line " + std::to_string(line_no));
        lst.push_back(Neighbor{id, ip});
    }
    for (const auto& lst : gt.per_query)
        gt.k = std::max<std::uint32_t>(gt.k, static_cast<std::uint32_t>(lst.size()));
    return gt;
}

} // namespace lshmips
