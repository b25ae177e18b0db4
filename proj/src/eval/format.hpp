#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace forl::eval::detail {

/// Shortest-ish fixed rendering used in every CSV and SVG file: 10
/// significant digits, "nan" / "inf" spelled out.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace forl::eval::detail
