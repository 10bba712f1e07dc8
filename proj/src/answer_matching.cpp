#include "cotrim/answer_matching.hpp"

#include <regex>

#include "cotrim/types.hpp"
#include "text_util.hpp"

namespace cotrim {

using detail::collapse_whitespace;
using detail::to_lower_ascii;
using detail::trim;

namespace {

// A line that is nothing but a number, optionally signed, with optional
// decimals, an integer denominator, or a percent sign.
const std::regex& numeric_line_re() {
    static const std::regex re(R"([+-]?[0-9][0-9,]*(\.[0-9]+)?(/[0-9]+)?%?)");
    return re;
}

const std::regex& thousands_integer_re() {
    static const std::regex re(R"([+-]?[0-9]{1,3}(,[0-9]{3})+)");
    return re;
}

// Reads a balanced {...} group starting at s[i] == '{'. On success, i is
// advanced past the closing brace.
bool read_group(std::string_view s, size_t& i, std::string& out) {
    if (i >= s.size() || s[i] != '{') return false;
    int depth = 1;
    size_t start = ++i;
    while (i < s.size() && depth > 0) {
        if (s[i] == '{') ++depth;
        else if (s[i] == '}') --depth;
        ++i;
    }
    if (depth != 0) return false;
    out.assign(s.substr(start, i - 1 - start));
    return true;
}

std::optional<std::string> extract_marker(std::string_view completion) {
    std::optional<std::string> found;
    size_t pos = 0;
    const std::string_view marker = kOnPolicyAnswerMarker;
    while (true) {
        size_t at = completion.find(marker, pos);
        if (at == std::string_view::npos) break;
        size_t begin = at + marker.size();
        size_t eol = completion.find('\n', begin);
        std::string_view span = eol == std::string_view::npos
                                    ? completion.substr(begin)
                                    : completion.substr(begin, eol - begin);
        std::string answer = trim(span);
        if (!answer.empty()) found = std::move(answer);
        pos = begin;
    }
    return found;
}

std::optional<std::string> extract_boxed(std::string_view completion) {
    std::optional<std::string> found;
    const std::string_view tag = "\\boxed";
    size_t pos = 0;
    while (true) {
        size_t at = completion.find(tag, pos);
        if (at == std::string_view::npos) break;
        size_t i = at + tag.size();
        std::string content;
        if (read_group(completion, i, content)) {
            std::string answer = trim(content);
            if (!answer.empty()) found = std::move(answer);
            pos = i;
        } else {
            pos = at + tag.size();
        }
    }
    return found;
}

std::optional<std::string> extract_numeric_line(std::string_view completion) {
    std::optional<std::string> found;
    size_t pos = 0;
    while (pos <= completion.size()) {
        size_t eol = completion.find('\n', pos);
        std::string_view line = eol == std::string_view::npos
                                    ? completion.substr(pos)
                                    : completion.substr(pos, eol - pos);
        std::string candidate = trim(line);
        if (!candidate.empty() && std::regex_match(candidate, numeric_line_re()))
            found = std::move(candidate);
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return found;
}

// Removes one wrapper that spans the whole string: \boxed{...}, \(...\),
// \[...\], $$...$$ or $...$. Returns the input unchanged when none applies.
std::string unwrap_once(const std::string& s) {
    auto wrapped_by = [&](std::string_view open, std::string_view close) {
        return s.size() >= open.size() + close.size() &&
               s.compare(0, open.size(), open) == 0 &&
               s.compare(s.size() - close.size(), close.size(), close) == 0;
    };
    if (s.rfind("\\boxed{", 0) == 0 && s.back() == '}') {
        size_t i = 6;
        std::string content;
        if (read_group(s, i, content) && i == s.size()) return content;
    }
    if (wrapped_by("\\(", "\\)") || wrapped_by("\\[", "\\]"))
        return s.substr(2, s.size() - 4);
    if (wrapped_by("$$", "$$")) return s.substr(2, s.size() - 4);
    if (wrapped_by("$", "$")) return s.substr(1, s.size() - 2);
    return s;
}

std::string rewrite_fractions(const std::string& s) {
    const std::string_view tag = "\\frac";
    std::string out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t at = s.find(tag, pos);
        if (at == std::string::npos) {
            out.append(s, pos, std::string::npos);
            break;
        }
        out.append(s, pos, at - pos);
        size_t i = at + tag.size();
        std::string num, den;
        if (read_group(s, i, num) && read_group(s, i, den)) {
            out += num;
            out += '/';
            out += den;
            pos = i;
        } else {
            out.append(s, at, tag.size());
            pos = at + tag.size();
        }
    }
    return out;
}

std::string strip_thousands(std::string s) {
    if (!std::regex_match(s, thousands_integer_re())) return s;
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (c != ',') out.push_back(c);
    return out;
}

std::string normalize_pass(const std::string& in) {
    std::string s = trim(in);
    s = unwrap_once(s);
    s = trim(s);
    while (!s.empty() && s.back() == '.') s.pop_back();
    s = collapse_whitespace(s);
    s = to_lower_ascii(std::move(s));
    s = rewrite_fractions(s);
    s = strip_thousands(std::move(s));
    return s;
}

}  // namespace

std::string extraction_mode_name(ExtractionMode mode) {
    switch (mode) {
        case ExtractionMode::OnPolicyMarker: return "onpolicy-marker";
        case ExtractionMode::Boxed: return "boxed";
        case ExtractionMode::Auto: return "auto";
    }
    return "auto";
}

ExtractionMode parse_extraction_mode(std::string_view name) {
    if (name == "onpolicy-marker") return ExtractionMode::OnPolicyMarker;
    if (name == "boxed") return ExtractionMode::Boxed;
    if (name == "auto") return ExtractionMode::Auto;
    throw Error(ErrorKind::ConfigError, "unknown extraction mode: " + std::string(name));
}

std::optional<std::string> extract_final_answer(std::string_view completion, ExtractionMode mode) {
    switch (mode) {
        case ExtractionMode::OnPolicyMarker:
            return extract_marker(completion);
        case ExtractionMode::Boxed:
            return extract_boxed(completion);
        case ExtractionMode::Auto:
            if (auto boxed = extract_boxed(completion)) return boxed;
            if (auto marker = extract_marker(completion)) return marker;
            return extract_numeric_line(completion);
    }
    return std::nullopt;
}

std::string normalize_answer(std::string_view text) {
    std::string current(text);
    for (int round = 0; round < 16; ++round) {
        std::string next = normalize_pass(current);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

bool answers_match(std::string_view candidate, std::string_view gold) {
    std::string c = normalize_answer(candidate);
    if (c.empty()) return false;
    return c == normalize_answer(gold);
}

}  // namespace cotrim
