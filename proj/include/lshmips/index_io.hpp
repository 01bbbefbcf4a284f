#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "lshmips/common.hpp"
#include "lshmips/index.hpp"

namespace lshmips {
namespace detail {

// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
inline const std::array<std::uint32_t, 256>& crc32_table() {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    return table;
}

inline std::uint32_t crc32(const unsigned char* data, std::size_t len) {
    const auto& t = crc32_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) c = t[(c ^ data[i]) & 0xffu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }
    std::vector<unsigned char>& bytes() { return bytes_; }

private:
    std::vector<unsigned char> bytes_;
};

class ByteReader {
public:
    ByteReader(const unsigned char* data, std::size_t len) : data_(data), len_(len) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() {
        const unsigned char* p = take(2);
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }
    std::uint32_t u32() {
        const unsigned char* p = take(4);
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    }
    std::uint64_t u64() {
        std::uint64_t lo = u32();
        std::uint64_t hi = u32();
        return lo | (hi << 32);
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    std::size_t remaining() const { return len_ - pos_; }

private:
    const unsigned char* take(std::size_t n) {
        if (len_ - pos_ < n) throw DataError("truncated index data");
        const unsigned char* p = data_ + pos_;
        pos_ += n;
        return p;
    }
    const unsigned char* data_;
    std::size_t len_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline constexpr std::array<unsigned char, 4> kIndexMagic = {'N', 'R', 'I', 'X'};
inline constexpr std::uint16_t kIndexFormatVersion = 1;

/// Serializes an index to a versioned, checksummed little-endian byte
/// layout. Hash functions are regenerated from the stored seed on load, so
/// the matrices themselves are never written.
inline std::vector<unsigned char> serialize_index(const NormRangeIndex& index) {
    detail::ByteWriter w;
    w.u16(kIndexFormatVersion);
    w.u16(0); // reserved
    const PartitionConfig& cfg = index.config;
    w.u8(static_cast<std::uint8_t>(cfg.algorithm));
    w.u8(cfg.shared_hashes ? 1 : 0);
    w.u32(cfg.code_length);
    w.u32(cfg.partitions);
    w.u64(cfg.seed);
    w.f64(cfg.shrink);
    w.u32(cfg.tail_length);
    w.f64(cfg.bucket_width);
    w.u32(cfg.cross_dim);
    w.u64(index.dataset_size);
    w.u64(index.data_dim);
    for (const SubIndex& sub : index.subs) {
        w.f64(sub.max_norm);
        w.u64(sub.member_ids.size());
        for (auto id : sub.member_ids) w.u32(id);
        w.u64(sub.buckets.size());
        for (const Bucket& b : sub.buckets) {
            for (auto s : b.code.symbols) w.i32(s);
            w.u64(b.items.size());
            for (auto id : b.items) w.u32(id);
        }
    }
    w.u64(index.schedule.size());
    for (const ProbeClass& p : index.schedule) {
        w.f64(p.score);
        w.u32(p.sub);
        w.u32(p.matches);
    }

    std::vector<unsigned char> out(kIndexMagic.begin(), kIndexMagic.end());
    out.insert(out.end(), w.bytes().begin(), w.bytes().end());
    std::uint32_t crc = detail::crc32(w.bytes().data(), w.bytes().size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(crc >> (8 * i)));
    return out;
}

inline NormRangeIndex deserialize_index(const unsigned char* data, std::size_t len) {
    if (len < kIndexMagic.size() + 4 || !std::equal(kIndexMagic.begin(), kIndexMagic.end(), data))
        throw DataError("not an index file (bad magic)");
    std::size_t payload_len = len - kIndexMagic.size() - 4;
    const unsigned char* payload = data + kIndexMagic.size();
    std::uint32_t stored_crc = static_cast<std::uint32_t>(data[len - 4]) |
                               (static_cast<std::uint32_t>(data[len - 3]) << 8) |
                               (static_cast<std::uint32_t>(data[len - 2]) << 16) |
                               (static_cast<std::uint32_t>(data[len - 1]) << 24);
    if (detail::crc32(payload, payload_len) != stored_crc)
        throw DataError("index checksum mismatch");

    detail::ByteReader r(payload, payload_len);
    std::uint16_t version = r.u16();
    if (version != kIndexFormatVersion)
        throw DataError("unsupported index format version " + std::to_string(version));
    r.u16(); // reserved
    NormRangeIndex index;
    PartitionConfig& cfg = index.config;
    std::uint8_t algo = r.u8();
    if (algo > static_cast<std::uint8_t>(MetaAlgorithm::CrossLsh))
        throw DataError("unknown algorithm tag in index");
    cfg.algorithm = static_cast<MetaAlgorithm>(algo);
    cfg.shared_hashes = r.u8() != 0;
    cfg.code_length = r.u32();
    cfg.partitions = r.u32();
    cfg.seed = r.u64();
    cfg.shrink = r.f64();
    cfg.tail_length = r.u32();
    cfg.bucket_width = r.f64();
    cfg.cross_dim = r.u32();
    index.dataset_size = r.u64();
    index.data_dim = r.u64();
    if (cfg.partitions < 1 || cfg.code_length < 1 || index.data_dim < 1)
        throw DataError("corrupt index header");

    index.sub_of.assign(index.dataset_size, 0);
    index.subs.resize(cfg.partitions);
    for (std::uint32_t j = 0; j < cfg.partitions; ++j) {
        SubIndex& sub = index.subs[j];
        sub.max_norm = r.f64();
        std::uint64_t members = r.u64();
        sub.member_ids.resize(members);
        for (auto& id : sub.member_ids) {
            id = r.u32();
            if (id >= index.dataset_size) throw DataError("corrupt index: item id out of range");
            index.sub_of[id] = j;
        }
        std::uint64_t buckets = r.u64();
        sub.buckets.resize(buckets);
        for (auto& b : sub.buckets) {
            b.code.symbols.resize(cfg.code_length);
            for (auto& s : b.code.symbols) {
                s = r.i32();
                bool ok = true;
                if (cfg.algorithm == MetaAlgorithm::CrossLsh)
                    ok = s != 0 && std::abs(s) <= static_cast<std::int32_t>(cfg.cross_dim);
                else if (cfg.algorithm != MetaAlgorithm::L2Alsh)
                    ok = s == 1 || s == -1;
                if (!ok) throw DataError("corrupt index: hash symbol out of range");
            }
            std::uint64_t items = r.u64();
            b.items.resize(items);
            for (auto& id : b.items) {
                id = r.u32();
                if (id >= index.dataset_size)
                    throw DataError("corrupt index: bucket item id out of range");
            }
        }
    }
    std::uint64_t schedule = r.u64();
    index.schedule.resize(schedule);
    for (auto& p : index.schedule) {
        p.score = r.f64();
        p.sub = r.u32();
        p.matches = r.u32();
        if (p.sub >= cfg.partitions || p.matches > cfg.code_length)
            throw DataError("corrupt index: probe schedule entry out of range");
    }
    if (r.remaining() != 0) throw DataError("trailing bytes after index payload");

    // Regenerate the hash functions from the stored seed and parameters.
    std::size_t family_count = cfg.shared_hashes ? 1 : cfg.partitions;
    for (std::uint32_t f = 0; f < family_count; ++f)
        index.families.push_back(sample_family(cfg, index.data_dim, family_seed_for(cfg, f)));
    return index;
}

inline void save_index(const NormRangeIndex& index, const std::string& path) {
    auto bytes = serialize_index(index);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failure on file: " + path);
}

inline NormRangeIndex load_index(const std::string& path) {
    auto bytes = detail::slurp(path);
    return deserialize_index(bytes.data(), bytes.size());
}

} // namespace lshmips
