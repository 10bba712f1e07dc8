#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cotrim/answer_matching.hpp"
#include "cotrim/dataset_builder.hpp"
#include "cotrim/eval_harness.hpp"
#include "cotrim/metrics.hpp"
#include "cotrim/oracle_client.hpp"
#include "cotrim/prune_search.hpp"
#include "cotrim/segmentation.hpp"
#include "cotrim/types.hpp"

namespace cotrim {

// Source field names for JSONL ingestion; remappable for corpora whose
// columns are named differently.
struct FieldMap {
    std::string id = "id";
    std::string question = "question";
    std::string answer = "answer";
    std::string response = "response";

    bool operator==(const FieldMap&) const = default;
};

struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path out_dir = "out";
    FieldMap field_map;
    SegmentationConfig segmentation;
    EndpointConfig oracle_endpoint;
    EndpointConfig eval_endpoint;
    EndpointConfig judge_endpoint;
    SearchConfig search;
    TokenCounter counter;
    // On-policy template override; placeholders are checked at load time.
    std::optional<std::string> oracle_template_text;
    std::string oracle_joiner = "\n\n";
    std::string eval_instruction_prefix;
    bool eval_exclude_failed = false;
    ExtractionMode eval_extraction = ExtractionMode::Auto;
    int workers = 4;
    uint64_t seed = 0;
    std::optional<std::filesystem::path> cache_path;

    static RunConfig load(const std::filesystem::path& config_path);

    OraclePromptTemplate oracle_template() const;
    std::filesystem::path resolved_cache_path() const;
    // The effective configuration with defaults applied; hashed into the
    // run manifest.
    nlohmann::json snapshot() const;
    void validate_common() const;  // throws Error(ConfigError)
};

// Tolerant corpus loader: malformed lines and records violating the source
// invariants become skip entries instead of aborting the run.
std::vector<SourceRecord> load_corpus(const std::filesystem::path& input, const FieldMap& map,
                                      std::vector<SkipEntry>& skips);

std::vector<BenchItem> load_bench(const std::filesystem::path& input, const FieldMap& map);

struct PruneRun {
    size_t n_input = 0;
    size_t n_distilled = 0;
    size_t n_skipped = 0;
    std::optional<size_t> endpoint_requests;  // absent with an injected client
    std::filesystem::path distilled_path;
    std::filesystem::path skips_path;
    std::filesystem::path manifest_path;
};

// Parse -> search -> distill for every record; writes distilled.jsonl,
// skips.jsonl and run-manifest.json. Passing a client skips construction
// of the HTTP client (tests use scripted transports).
PruneRun run_prune(const RunConfig& cfg, ChatClient* oracle_client = nullptr);

struct DryRun {
    size_t n_records = 0;
    std::string sample_id;
    std::string sample_prompt;  // full-trace prompt of the first parseable record
};

// Counts records and renders one sample prompt. No network, no outputs.
DryRun run_dry(const RunConfig& cfg);

// kind is "sft" or "dpo". Reads distilled.jsonl, writes <kind>.jsonl and
// folds this stage's skip entries into skips.jsonl (its previous entries
// for the stage are replaced, so reruns stay idempotent).
EmitResult run_emit(const RunConfig& cfg, std::string_view kind);

// Per-strategy statistics over distilled.jsonl; writes stats-report.json.
std::map<std::string, StrategyStats> run_stats(const RunConfig& cfg);

// Benchmark accuracy/length run; writes eval-report.json and
// eval-verdicts.jsonl (resumable by item id).
EvalReport run_eval(const RunConfig& cfg, ChatClient* client = nullptr);

struct JudgeRun {
    double mean_score = 0.0;
    size_t n_scored = 0;
    size_t n_failed = 0;
};

// Scores {id, question, response} rows (sft.jsonl works as-is) with the
// judge rubric; writes judge-report.json and judge-verdicts.jsonl.
JudgeRun run_judge(const RunConfig& cfg, ChatClient* client = nullptr);

}  // namespace cotrim
