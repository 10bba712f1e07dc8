#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cotrim/segmentation.hpp"
#include "cotrim/types.hpp"

namespace cotrim {

enum class TokenCounterMode {
    Whitespace,  // maximal non-whitespace runs
    CharApprox,  // ceil(bytes / 4)
    External,    // external command: text on stdin, count on stdout
};

std::string token_counter_mode_name(TokenCounterMode mode);
TokenCounterMode parse_token_counter_mode(std::string_view name);

// Counts are approximations of model-tokenizer tokens; the default
// Whitespace mode undercounts subword splits but is stable across
// environments. External mode exists for tokenizer-parity studies.
struct TokenCounter {
    TokenCounterMode mode = TokenCounterMode::Whitespace;
    std::string command;  // External only, e.g. "python3 count_tokens.py"

    size_t count(std::string_view text) const;

    bool operator==(const TokenCounter&) const = default;
};

struct ThinkTokenCount {
    size_t tokens = 0;
    bool think_found = false;

    bool operator==(const ThinkTokenCount&) const = default;
};

// Token count of the think-block interior only. When the text has no
// parseable think block the count is 0 and think_found is false; callers
// that want full-output fallback count the whole text themselves.
ThinkTokenCount count_think_tokens(std::string_view text, const TokenCounter& counter,
                                   const SegmentationConfig& cfg = {});

// remaining_mean / orig_mean * 100 (ratio of corpus averages).
double corpus_ratio(double orig_mean, double remaining_mean);  // throws ZeroOriginal

// Ten bins [0,10), [10,20), ..., [90,100]; a boundary value lands in the
// higher bin except 100, which lands in the last.
std::array<size_t, 10> bucket_distribution(const std::vector<double>& ratios_percent);

struct StrategyStats {
    Strategy strategy = Strategy::BinaryCut;
    double orig_mean = 0.0;
    double remaining_mean = 0.0;
    double ratio = 0.0;  // percentage, two-decimal rounded
    std::array<size_t, 10> bins{};
    size_t n_records = 0;
    size_t n_rejected = 0;
    // Diagnostic: fraction of records whose kept prefix ends within the
    // last 10 steps of the original trace.
    double last10_fraction = 0.0;

    bool operator==(const StrategyStats&) const = default;
};

StrategyStats compute_strategy_stats(Strategy strategy,
                                     const std::vector<DistilledRecord>& records,
                                     size_t n_rejected);

double round2(double x);

}  // namespace cotrim
