#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cotrim/types.hpp"

namespace cotrim {

// Prompt used to re-answer a question from a given prefix of thinking
// steps. The responding model must emit "###Answer: <final_answer>".
inline constexpr const char* kOnPolicyPromptText =
    R"(Given a mathematical problem and a series of thinking steps, your task is to determine the final answer based on the provided steps.

Instructions:

- Follow the given thinking steps exactly to derive the answer.

- Do not add any explanations, reasoning, or modifications.

- Output only the final answer in the specified format.

Formatting Requirement:

- The output should be strictly formatted as:

###Answer: <final_answer>

Now, here is the problem:
{question}

The thinking steps are given below:
{thinking_steps})";

struct OraclePromptTemplate {
    std::string text = kOnPolicyPromptText;
    std::string joiner = "\n\n";
    std::string version = "onpolicy-v1";

    // Both {question} and {thinking_steps} must occur exactly once.
    void validate() const;  // throws Error(TemplateInvalid)

    bool operator==(const OraclePromptTemplate&) const = default;
};

struct EndpointConfig {
    std::string base_url;  // e.g. "http://127.0.0.1:8000/v1"
    std::string model_name;
    double temperature = 0.0;
    int max_output_tokens = 256;
    int request_timeout_s = 120;
    int max_retries = 2;
    int max_in_flight = 4;
    // Name of the environment variable holding the API key. The key itself
    // never appears in config files.
    std::string api_key_env = "OPENAI_API_KEY";

    void validate() const;  // throws Error(ConfigError)

    bool operator==(const EndpointConfig&) const = default;
};

struct ValidationVerdict {
    size_t prefix_len = 0;
    std::string rendered_prompt;
    std::string raw_completion;
    std::optional<std::string> extracted;
    // Which extractor produced the answer: "onpolicy-marker",
    // "auto-fallback" (marker missing, logged via this field) or "none".
    std::string extractor = "none";
    bool valid = false;
    bool from_cache = false;
    int64_t latency_ms = 0;

    bool operator==(const ValidationVerdict&) const = default;
};

std::string render_onpolicy_prompt(const std::string& question,
                                   const std::vector<std::string>& steps,
                                   const OraclePromptTemplate& tpl);

// Text-in/text-out completion transport. Implementations throw
// Error(EndpointError) when no completion can be obtained.
class ChatClient {
  public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::string model_name() const = 0;
};

// OpenAI-compatible chat-completions client with bounded parallelism and
// retry. Safe for concurrent use; at most max_in_flight requests run at
// once across all threads sharing one instance.
class HttpChatClient : public ChatClient {
  public:
    explicit HttpChatClient(EndpointConfig cfg);

    std::string complete(const std::string& prompt) override;
    std::string model_name() const override { return cfg_.model_name; }

    size_t request_count() const { return requests_.load(); }

  private:
    EndpointConfig cfg_;
    std::string origin_;
    std::string path_prefix_;
    std::string api_key_;
    std::counting_semaphore<4096> slots_;
    std::atomic<size_t> requests_{0};
};

struct OracleCacheEntry {
    std::string key;
    size_t prefix_len = 0;
    bool valid = false;
    std::optional<std::string> extracted;
    std::string extractor = "none";
    std::string completion;

    bool operator==(const OracleCacheEntry&) const = default;
};

// Append-only JSONL verdict store (schema 1). Concurrent get/put is safe;
// duplicate keys resolve last-writer-wins. Unparseable lines (e.g. a
// half-written tail after a crash) are skipped on load.
class OracleCache {
  public:
    explicit OracleCache(std::filesystem::path path);

    std::optional<OracleCacheEntry> get(const std::string& key) const;
    void put(const OracleCacheEntry& entry);
    size_t size() const;
    const std::filesystem::path& path() const { return path_; }

  private:
    mutable std::mutex mu_;
    std::filesystem::path path_;
    std::unordered_map<std::string, OracleCacheEntry> entries_;
};

// Cache identity of one oracle call. The prompt hash guards against
// collisions between different step selections of equal length.
std::string oracle_cache_key(const std::string& record_id, size_t prefix_len,
                             const std::string& model_name, const std::string& template_version,
                             const std::string& normalization_version,
                             const std::string& rendered_prompt);

// One evaluation of the validation function: render the prompt, obtain a
// completion (cache first), extract the answer and compare to gold.
// Endpoint failure propagates as Error(EndpointError); it is never encoded
// as valid=false.
ValidationVerdict validate_prefix(const std::string& record_id, const std::string& question,
                                  const std::vector<std::string>& steps, const std::string& gold,
                                  ChatClient& client, const OraclePromptTemplate& tpl,
                                  OracleCache* cache = nullptr);

}  // namespace cotrim
