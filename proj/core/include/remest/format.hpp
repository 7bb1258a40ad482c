#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace remest {

/// Formats a double with 12 significant digits, the precision all emitted
/// files use so that byte-for-byte golden comparisons are meaningful.
inline std::string fmt_g12(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

/// Rounds through the 12-digit representation (used before JSON emission so
/// serialized numbers match the printed precision).
inline double round_g12(double value) {
    return std::strtod(fmt_g12(value).c_str(), nullptr);
}

} // namespace remest
