#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace amp {

/// Shortest round-trip decimal form of a double. All serializers use this so
/// that write -> read -> write is byte-identical and lossless.
inline std::string fmt_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace amp
