#pragma once

#include <cstdio>
#include <string>

namespace epj {

/// Locale-independent formatting used by every CSV writer. 9 significant
/// digits for data files, 17 for lossless config round-trips.
inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace epj
