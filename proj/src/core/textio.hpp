#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace spinsense {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
        if (std::strtod(buf, nullptr) == value)
            break;
    }
    return buf;
}

} // namespace spinsense
