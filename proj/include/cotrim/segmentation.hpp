#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cotrim/types.hpp"

namespace cotrim {

struct SegmentationConfig {
    std::string think_open = "<think>";
    std::string think_close = "</think>";
    // Literal separator between steps. The default (a blank line) treats each
    // paragraph of the thinking text as one reasoning step; set to "\n" for
    // corpora without blank lines.
    std::string step_separator = "\n\n";

    void validate() const;  // throws Error(ConfigError)

    bool operator==(const SegmentationConfig&) const = default;
};

// Splits thinking text into steps on the configured separator. Runs of
// separators collapse into one boundary; every step is trimmed and empty
// fragments are dropped. All-whitespace input yields an empty list.
std::vector<std::string> split_steps(std::string_view thinking, const SegmentationConfig& cfg = {});

// Canonical inverse of split_steps for already-trimmed steps.
std::string join_steps(const std::vector<std::string>& steps, const SegmentationConfig& cfg = {});

// Parses the first think block of a raw response into steps + summary.
// Later think tags are treated as plain text. CRLF line endings are
// normalized to LF before scanning.
//
// Throws Error with MissingOpenTag, MissingCloseTag or EmptyThinkBlock when
// the record is unusable.
ReasoningTrace parse_response(std::string_view raw, const SegmentationConfig& cfg = {});

}  // namespace cotrim
