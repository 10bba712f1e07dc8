#include "cotrim/segmentation.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace cotrim {

using detail::is_space;
using detail::trim;

namespace {

std::string normalize_newlines(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '\r' && i + 1 < raw.size() && raw[i + 1] == '\n') continue;
        out.push_back(raw[i]);
    }
    return out;
}

}  // namespace

void SegmentationConfig::validate() const {
    if (think_open.empty() || think_close.empty())
        throw Error(ErrorKind::ConfigError, "think tags must be non-empty");
    if (think_open == think_close)
        throw Error(ErrorKind::ConfigError, "think_open and think_close must differ");
    if (step_separator.empty())
        throw Error(ErrorKind::ConfigError, "step_separator must be non-empty");
}

std::vector<std::string> split_steps(std::string_view thinking, const SegmentationConfig& cfg) {
    cfg.validate();
    std::vector<std::string> steps;
    size_t pos = 0;
    while (pos <= thinking.size()) {
        size_t next = thinking.find(cfg.step_separator, pos);
        std::string_view fragment = next == std::string_view::npos
                                        ? thinking.substr(pos)
                                        : thinking.substr(pos, next - pos);
        std::string step = trim(fragment);
        if (!step.empty()) steps.push_back(std::move(step));
        if (next == std::string_view::npos) break;
        pos = next + cfg.step_separator.size();
    }
    return steps;
}

std::string join_steps(const std::vector<std::string>& steps, const SegmentationConfig& cfg) {
    std::string out;
    for (size_t i = 0; i < steps.size(); ++i) {
        if (i > 0) out += cfg.step_separator;
        out += steps[i];
    }
    return out;
}

ReasoningTrace parse_response(std::string_view raw, const SegmentationConfig& cfg) {
    cfg.validate();
    std::string text = normalize_newlines(raw);

    size_t open = text.find(cfg.think_open);
    if (open == std::string::npos)
        throw Error(ErrorKind::MissingOpenTag, "no '" + cfg.think_open + "' tag in response");
    size_t body = open + cfg.think_open.size();

    size_t close = text.find(cfg.think_close, body);
    if (close == std::string::npos)
        throw Error(ErrorKind::MissingCloseTag, "no '" + cfg.think_close + "' tag in response");

    std::string_view interior(text.data() + body, close - body);
    if (std::all_of(interior.begin(), interior.end(), is_space))
        throw Error(ErrorKind::EmptyThinkBlock, "think block contains no text");

    ReasoningTrace trace;
    trace.steps = split_steps(interior, cfg);
    if (trace.steps.empty())
        throw Error(ErrorKind::EmptyThinkBlock, "think block contains no steps");
    trace.summary = trim(std::string_view(text).substr(close + cfg.think_close.size()));
    return trace;
}

}  // namespace cotrim
