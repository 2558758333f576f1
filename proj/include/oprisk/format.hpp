#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace oprisk {

// 17 significant digits, period as decimal separator regardless of locale.
inline std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    for (char& c : s)
        if (c == ',') c = '.';
    return s;
}

} // namespace oprisk
