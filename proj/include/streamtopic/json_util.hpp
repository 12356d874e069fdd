#ifndef STREAMTOPIC_JSON_UTIL_HPP
#define STREAMTOPIC_JSON_UTIL_HPP

#include <cctype>
#include <cstdio>
#include <string>
#include <string_view>

#include <json.hpp>

namespace streamtopic {

/// Doubles in serialized models carry 17 significant digits, enough to
/// round-trip IEEE binary64 exactly.
inline std::string format_double17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Fixed 6 decimal places, '.' separator; the results-CSV number format.
inline std::string format_fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// JSON string literal (quotes included), escaped per RFC 8259.
inline std::string json_quote(std::string_view s) {
    return nlohmann::json(std::string(s)).dump();
}

inline std::string trim_copy(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

}  // namespace streamtopic

#endif
