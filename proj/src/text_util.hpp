#pragma once

#include <string>
#include <string_view>

namespace cotrim::detail {

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim_view(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

inline std::string trim(std::string_view s) {
    return std::string(trim_view(s));
}

inline char lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower_ascii(std::string s) {
    for (char& c : s) c = lower_ascii(c);
    return s;
}

// Substitutes two placeholders, each occurring exactly once in text.
// Placeholder-shaped content inside the values is never re-expanded.
inline std::string splice_two(std::string_view text, std::string_view slot_a,
                              const std::string& val_a, std::string_view slot_b,
                              const std::string& val_b) {
    struct Slot {
        size_t pos;
        size_t len;
        const std::string* value;
    };
    Slot a{text.find(slot_a), slot_a.size(), &val_a};
    Slot b{text.find(slot_b), slot_b.size(), &val_b};
    if (a.pos > b.pos) std::swap(a, b);

    std::string out;
    out.reserve(text.size() + val_a.size() + val_b.size());
    out.append(text.substr(0, a.pos));
    out += *a.value;
    out.append(text.substr(a.pos + a.len, b.pos - (a.pos + a.len)));
    out += *b.value;
    out.append(text.substr(b.pos + b.len));
    return out;
}

// Replaces every whitespace run with a single space.
inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_run = false;
    for (char c : s) {
        if (is_space(c)) {
            in_run = true;
            continue;
        }
        if (in_run && !out.empty()) out.push_back(' ');
        in_run = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace cotrim::detail
