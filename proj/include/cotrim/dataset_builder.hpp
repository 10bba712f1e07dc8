#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cotrim/metrics.hpp"
#include "cotrim/segmentation.hpp"
#include "cotrim/types.hpp"

namespace cotrim {

// DPO hyperparameters recommended to the downstream trainer.
inline constexpr double kRecommendedSftLossWeight = 0.3;
inline constexpr double kDpoBeta = 0.1;

// One pruned record as persisted in distilled.jsonl: the distilled texts
// plus enough provenance to emit and audit without re-running the search.
struct DistilledRow {
    DistilledRecord record;
    Strategy strategy = Strategy::BinaryCut;
    PruneStatus status = PruneStatus::Failed;
    size_t oracle_calls_count = 0;
    std::vector<size_t> kept_indices;  // random strategy only, 1-based
    std::optional<std::string> error_detail;

    bool operator==(const DistilledRow&) const = default;
};

struct SftRecord {
    std::string id;
    std::string question;
    std::string response;  // Y
    Strategy strategy = Strategy::BinaryCut;
    size_t kept_steps = 0;
    size_t orig_steps = 0;
    size_t oracle_calls_count = 0;

    bool operator==(const SftRecord&) const = default;
};

struct DpoRecord {
    std::string id;
    std::string prompt;    // the question, untemplated
    std::string chosen;    // Y
    std::string rejected;  // R
    double recommended_sft_loss_weight = kRecommendedSftLossWeight;
    double beta = kDpoBeta;

    bool operator==(const DpoRecord&) const = default;
};

struct SkipEntry {
    std::string id;
    std::string stage;   // "prune" | "sft" | "dpo"
    std::string reason;  // stable reason code
    std::string detail;
    std::string strategy;  // empty when not strategy-specific

    bool operator==(const SkipEntry&) const = default;
};

// Reassembles the pruned response Y, byte-exact:
//   think_open + "\n" + kept steps joined by the step separator + "\n" +
//   think_close + "\n\n" + summary
std::string build_pruned_response(const ReasoningTrace& trace, size_t kept_len,
                                  const SegmentationConfig& cfg = {});

// Same formula over an explicit 1-based step selection (random strategy).
std::string build_pruned_response(const ReasoningTrace& trace,
                                  const std::vector<size_t>& kept_indices,
                                  const SegmentationConfig& cfg = {});

struct EmitResult {
    size_t written = 0;
    std::vector<SkipEntry> skips;

    bool operator==(const EmitResult&) const = default;
};

// Writes sft.jsonl. Rows with status Pruned or KeptFull are emitted; other
// rows become skip entries. Every emitted response is re-parsed as a final
// guard; a mismatch between re-parsed and recorded step counts skips the
// row instead of emitting a corrupt record.
EmitResult emit_sft(const std::vector<DistilledRow>& rows, const std::filesystem::path& path,
                    const SegmentationConfig& cfg = {});

// Writes dpo.jsonl with chosen = Y, rejected = R. KeptFull rows carry no
// length contrast and are skipped. Pairs violating chosen != rejected or
// token_count(chosen) <= token_count(rejected) are skipped with reason
// codes rather than emitted.
EmitResult emit_dpo(const std::vector<DistilledRow>& rows, const std::filesystem::path& path,
                    const TokenCounter& counter, const SegmentationConfig& cfg = {});

}  // namespace cotrim
