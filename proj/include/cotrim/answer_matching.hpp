#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace cotrim {

// Version tag for the fixed normalization ruleset below. Bump when rules
// change so cached verdicts from older runs stop matching.
inline constexpr const char* kNormalizationVersion = "norm-v1";

// Output marker mandated by the on-policy answering prompt.
inline constexpr const char* kOnPolicyAnswerMarker = "###Answer:";

enum class ExtractionMode {
    OnPolicyMarker,  // rest of the line after the last "###Answer:"
    Boxed,           // content of the last balanced \boxed{...}
    Auto,            // Boxed, then OnPolicyMarker, then last standalone numeric line
};

std::string extraction_mode_name(ExtractionMode mode);
ExtractionMode parse_extraction_mode(std::string_view name);

// Returns the trimmed answer span, or nullopt when no pattern matches.
// The last occurrence wins for every pattern.
std::optional<std::string> extract_final_answer(std::string_view completion, ExtractionMode mode);

// Normalization ruleset "norm-v1", applied to fixpoint so the result is
// idempotent by construction:
//   trim -> unwrap one full-string \boxed{...} / \(...\) / \[...\] / $...$
//   -> strip trailing periods -> collapse whitespace runs to one space
//   -> ASCII lowercase -> rewrite \frac{a}{b} to a/b
//   -> drop thousands separators from pure integers
std::string normalize_answer(std::string_view text);

// Exact match under normalize_answer. Empty candidate never matches.
bool answers_match(std::string_view candidate, std::string_view gold);

}  // namespace cotrim
