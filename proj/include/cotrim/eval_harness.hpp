#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cotrim/answer_matching.hpp"
#include "cotrim/metrics.hpp"
#include "cotrim/oracle_client.hpp"
#include "cotrim/segmentation.hpp"
#include "cotrim/types.hpp"

namespace cotrim {

// Additive 5-point CoT quality rubric; the judged model must end with
// "Score: <total points>".
inline constexpr const char* kJudgePromptText =
    R"(Review the user's question and the corresponding chain-of-thought (CoT) reasoning using the additive 5-point scoring system described below. Points are accumulated based on the satisfaction of each criterion:

- Add 1 point if the CoT is relevant and initiates a reasoning process related to the user's inquiry, even if it is incomplete or contains some irrelevant steps.

- Add another point if the CoT addresses a substantial portion of the reasoning needed for the question, but does not completely resolve it or contains gaps in logic.

- Award a third point if the CoT outlines the basic logical structure needed to solve the problem, demonstrating generally sound reasoning without unnecessary tangents.

- Grant a fourth point if the CoT is clearly and logically structured, with each step building on the last. The reasoning should be easy to follow, focused on solving the user's question, and reasonably efficient, though not necessarily optimal in brevity or precision. It's acceptable to stop the reasoning early if the remaining steps are obvious or strongly implied.

- Bestow a fifth point if the CoT provides a complete, correct, and concise line of reasoning that leads efficiently to the final answer. It should include all necessary intermediate steps and be of appropriate length—neither too brief to omit key logic nor too long to include redundant or tangential content—reflecting expert-level clarity, precision, and efficiency.

User: {question}

<response>{response}</response>

After examining the user's instruction and the response:

- Briefly justify your total score, up to 100 words. Focus on relevance, logical completeness, clarity, and whether only the necessary reasoning steps were included without redundancy.

- Conclude with the score using the format: "Score: <total points>"

Remember to assess from the AI Assistant perspective, utilizing web search knowledge as necessary. To evaluate the response in alignment with this additive scoring model, systematically attribute points based on the outlined criteria.)";

struct BenchItem {
    std::string id;
    std::string question;
    std::string gold_answer;

    bool operator==(const BenchItem&) const = default;
};

struct ItemVerdict {
    std::string id;
    std::string completion;
    std::optional<std::string> extracted;
    bool correct = false;
    bool failed = false;  // endpoint error; scored incorrect by default
    std::optional<std::string> error_detail;
    size_t think_tokens = 0;
    bool think_found = false;  // false means the full output was counted
    int64_t latency_ms = 0;

    bool operator==(const ItemVerdict&) const = default;
};

struct EvalReport {
    double accuracy = 0.0;  // percent
    double avg_think_tokens = 0.0;
    size_t n_items = 0;
    size_t n_correct = 0;
    size_t n_failed = 0;
    std::vector<ItemVerdict> per_item;

    bool operator==(const EvalReport&) const = default;
};

struct EvalOptions {
    // Prepended to each question (with a blank line) when non-empty.
    std::string instruction_prefix;
    // When true, failed items leave the accuracy denominator; the default
    // keeps them and scores them incorrect.
    bool exclude_failed = false;
    ExtractionMode extraction = ExtractionMode::Auto;
    int workers = 4;
    // When set, verdicts are appended here as items complete, and items
    // already present (by id) are reused instead of re-queried.
    std::filesystem::path verdicts_path;
};

// Queries the endpoint once per item and scores exact-match accuracy plus
// thinking length. Think tokens fall back to the full completion when no
// think block parses (think_found=false on the verdict). avg_think_tokens
// averages over non-failed items.
EvalReport evaluate(const std::vector<BenchItem>& items, ChatClient& client,
                    const TokenCounter& counter, const EvalOptions& opts = {},
                    const SegmentationConfig& seg = {});

// Recomputes accuracy/averages from persisted verdicts; used to cross-check
// a report against its own trail.
EvalReport report_from_verdicts(const std::vector<ItemVerdict>& verdicts, bool exclude_failed);

struct JudgeTemplate {
    std::string text = kJudgePromptText;
    std::string version = "judge-v1";

    void validate() const;  // throws Error(TemplateInvalid)

    bool operator==(const JudgeTemplate&) const = default;
};

std::string render_judge_prompt(const std::string& question, const std::string& response,
                                const JudgeTemplate& tpl);

// Parses the last "Score: N" in the judged text.
// Throws Error(ScoreMissing) or Error(ScoreOutOfRange).
int parse_judge_score(const std::string& judged_text);

// Renders the rubric, queries the judge endpoint, parses the score.
int judge_score(const std::string& question, const std::string& response, ChatClient& judge,
                const JudgeTemplate& tpl = {});

}  // namespace cotrim
