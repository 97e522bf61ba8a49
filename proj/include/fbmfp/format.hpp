#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace fbmfp {

/// Shortest decimal string that parses back to the same double.
inline std::string shortest(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace fbmfp
