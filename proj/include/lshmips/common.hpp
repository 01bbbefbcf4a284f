#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lshmips {

/// Malformed or inconsistent input data (files, datasets, ground truth).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration supplied by the caller.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The four index construction strategies supported throughout the library.
enum class MetaAlgorithm {
    L2Alsh,
    SignAlsh,
    SimpleLsh,
    CrossLsh,
};

inline const char* algorithm_name(MetaAlgorithm a) {
    switch (a) {
        case MetaAlgorithm::L2Alsh: return "l2-alsh";
        case MetaAlgorithm::SignAlsh: return "sign-alsh";
        case MetaAlgorithm::SimpleLsh: return "simple-lsh";
        case MetaAlgorithm::CrossLsh: return "cross-lsh";
    }
    return "unknown";
}

inline std::optional<MetaAlgorithm> parse_algorithm(std::string_view name) {
    if (name == "l2-alsh") return MetaAlgorithm::L2Alsh;
    if (name == "sign-alsh") return MetaAlgorithm::SignAlsh;
    if (name == "simple-lsh") return MetaAlgorithm::SimpleLsh;
    if (name == "cross-lsh") return MetaAlgorithm::CrossLsh;
    return std::nullopt;
}

/// Formats a value with 9 significant digits, the precision used by all CSV output.
inline std::string format_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

} // namespace lshmips
