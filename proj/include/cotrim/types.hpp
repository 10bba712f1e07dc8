#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cotrim {

// Reason codes used across the pipeline. The serialized names are stable;
// they appear in skip reports, cache records and error messages.
enum class ErrorKind {
    MissingOpenTag,
    MissingCloseTag,
    EmptyThinkBlock,
    EmptySteps,
    TemplateInvalid,
    EndpointError,
    KeptLenOutOfRange,
    ZeroOriginal,
    RatioOutOfRange,
    ScoreMissing,
    ScoreOutOfRange,
    IoError,
    ConfigError,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

enum class Strategy {
    BinaryCut,
    Fcs,
    Random,
};

enum class PruneStatus {
    Pruned,
    KeptFull,
    RejectedFullInvalid,
    Failed,
};

std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);
std::string_view prune_status_name(PruneStatus s);
PruneStatus parse_prune_status(std::string_view name);

// One corpus entry as ingested: a question, its gold answer, and the raw
// model response that carries a think block.
struct SourceRecord {
    std::string id;
    std::string question;
    std::string gold_answer;
    std::string raw_response;
    std::map<std::string, std::string> meta;

    bool operator==(const SourceRecord&) const = default;
};

// Parsed response: ordered reasoning steps plus the summary text that
// follows the think block.
struct ReasoningTrace {
    std::vector<std::string> steps;
    std::string summary;

    std::size_t step_count() const noexcept { return steps.size(); }

    bool operator==(const ReasoningTrace&) const = default;
};

// One oracle probe: which prefix length was tested and what it returned.
struct OracleCall {
    std::size_t prefix_len = 0;
    bool valid = false;

    bool operator==(const OracleCall&) const = default;
};

// Result of running a pruning strategy over one trace.
//
// kept_indices is populated only by the random strategy, whose output is a
// non-contiguous subsequence; prefix strategies leave it empty and the kept
// steps are steps[0..kept_len).
struct PruneOutcome {
    Strategy strategy = Strategy::BinaryCut;
    PruneStatus status = PruneStatus::Failed;
    std::optional<std::size_t> kept_len;
    std::vector<std::size_t> kept_indices;  // 1-based step positions
    std::vector<OracleCall> oracle_calls;
    std::optional<std::string> error_detail;

    bool operator==(const PruneOutcome&) const = default;
};

// A record ready for dataset emission: the original full response R, the
// pruned response Y, and token accounting under the configured counter.
struct DistilledRecord {
    std::string id;
    std::string question;
    std::string full_response;    // R
    std::string pruned_response;  // Y
    std::size_t orig_steps = 0;
    std::size_t kept_steps = 0;
    std::int64_t orig_tokens = 0;
    std::int64_t kept_tokens = 0;
    double ratio = 0.0;  // kept_tokens / orig_tokens, in (0, 1]

    bool operator==(const DistilledRecord&) const = default;
};

// FNV-1a. Used for stable record ids, cache keys and config fingerprints;
// not cryptographic.
std::uint64_t stable_hash64(std::string_view data, std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t value);

// Stable id for records whose source carries none.
std::string derive_record_id(std::string_view question, std::string_view raw_response);

}  // namespace cotrim
