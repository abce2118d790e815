#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace egnn {

/// Raised for malformed input files, schema mismatches and other
/// problems with externally supplied data. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline bool in_unit_cube(std::span<const double> v) {
    for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0)) return false;
    }
    return true;
}

/// Shortest decimal string that parses back to exactly the same double.
/// Used everywhere a double is written to CSV/JSON text so that re-running
/// a command yields byte-identical files.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& context = {}) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw DataError("not a number: '" + std::string(s) + "'" +
                        (context.empty() ? "" : " (" + context + ")"));
    }
    return v;
}

inline long long parse_int(std::string_view s, const std::string& context = {}) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw DataError("not an integer: '" + std::string(s) + "'" +
                        (context.empty() ? "" : " (" + context + ")"));
    }
    return v;
}

}  // namespace egnn
