#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cotrim/types.hpp"

namespace cotrim {

enum class SearchMode {
    PaperFaithful,  // binary cutting + backtracking, the reference procedure
    StrictBinary,   // lower-bound binary search; assumes monotone validity
};

std::string search_mode_name(SearchMode mode);
SearchMode parse_search_mode(std::string_view name);

struct SearchConfig {
    bool precheck_full = true;
    Strategy strategy = Strategy::BinaryCut;
    double random_keep_prob = 0.5;
    uint64_t random_seed = 0;
    SearchMode mode = SearchMode::PaperFaithful;
    bool random_validate = false;

    void validate() const;  // throws Error(ConfigError)

    bool operator==(const SearchConfig&) const = default;
};

// Validity oracle over prefix lengths k in [1, n]. Throws
// Error(EndpointError) on transport failure; searches surface that as
// status Failed, never as an invalid verdict.
using PrefixOracle = std::function<bool(size_t)>;

// Validity oracle over an arbitrary kept-step subsequence (random strategy).
using StepsOracle = std::function<bool(const std::vector<std::string>&)>;

// Binary cutting with backtracking over step prefixes.
//
// PaperFaithful:
//   (0) when precheck_full, evaluate the full trace first; invalid input
//       short-circuits to RejectedFullInvalid.
//   (1) low=1, high=n, best=n; while low<high: mid=floor((low+high)/2);
//       valid -> best=mid, high=mid; invalid -> enter backtracking.
//   (2) backtracking over [mid, n]: mid=ceil((low+high)/2); valid -> return
//       mid; invalid -> low=mid+1.
//   (3) otherwise return best (Pruned when best<n, else KeptFull).
// Backtracking stops at the first valid midpoint, so the result can exceed
// the true minimal prefix; StrictBinary returns the exact threshold for
// monotone oracles.
PruneOutcome binary_cut(const ReasoningTrace& trace, const PrefixOracle& oracle,
                        const SearchConfig& cfg = {});

// Linear scan k = 1..n; returns the first valid prefix (exact minimum for
// any oracle).
PruneOutcome fcs_cut(const ReasoningTrace& trace, const PrefixOracle& oracle,
                     const SearchConfig& cfg = {});

// Keeps the first and last step always, each intermediate step
// independently with probability keep_prob. Output is a subsequence, not a
// prefix; kept_indices lists the 1-based positions. Deterministic per seed.
PruneOutcome random_cut(const ReasoningTrace& trace, uint64_t seed, double keep_prob,
                        bool validate_result = false, const StepsOracle& oracle = nullptr);

// Uniform draw in [0, 1) from the top 53 bits, identical on every platform.
double next_unit(std::mt19937_64& rng);

}  // namespace cotrim
