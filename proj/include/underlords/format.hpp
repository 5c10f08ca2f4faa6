#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace underlords {

/// Shortest decimal string that parses back to exactly the same double.
/// Used by every text exporter so emitted files are byte-stable and
/// round-trip without loss.
inline std::string format_number(double value) {
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

/// Table rendering: 10 significant digits, enough to hide accumulation
/// dust (0.1*3 prints as 0.3) without losing real information.
inline std::string format_compact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

} // namespace underlords
