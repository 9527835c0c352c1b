#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace wzlab {

/// Shortest decimal string that parses back to exactly `v` ('.' decimal point).
inline std::string format_double(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

}  // namespace wzlab
