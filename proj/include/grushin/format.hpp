#pragma once

#include <cstdio>
#include <string>

namespace grushin {

// Shortest decimal representation that round-trips a double. All emitted
// files use this, so identical runs produce byte-identical output.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

}  // namespace grushin
