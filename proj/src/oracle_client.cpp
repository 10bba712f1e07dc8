#include "cotrim/oracle_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cotrim/answer_matching.hpp"
#include "text_util.hpp"

namespace cotrim {

using nlohmann::json;

namespace {

constexpr std::string_view kQuestionSlot = "{question}";
constexpr std::string_view kStepsSlot = "{thinking_steps}";

size_t count_occurrences(std::string_view text, std::string_view needle) {
    size_t count = 0;
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string_view::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

struct SlotGuard {
    std::counting_semaphore<4096>& sem;
    explicit SlotGuard(std::counting_semaphore<4096>& s) : sem(s) { sem.acquire(); }
    ~SlotGuard() { sem.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;
};

json cache_entry_to_json(const OracleCacheEntry& e) {
    return json{{"schema", 1},
                {"key", e.key},
                {"prefix_len", e.prefix_len},
                {"valid", e.valid},
                {"extracted", e.extracted ? json(*e.extracted) : json(nullptr)},
                {"extractor", e.extractor},
                {"completion", e.completion}};
}

}  // namespace

void OraclePromptTemplate::validate() const {
    if (count_occurrences(text, kQuestionSlot) != 1)
        throw Error(ErrorKind::TemplateInvalid, "template needs exactly one {question}");
    if (count_occurrences(text, kStepsSlot) != 1)
        throw Error(ErrorKind::TemplateInvalid, "template needs exactly one {thinking_steps}");
}

void EndpointConfig::validate() const {
    if (temperature < 0.0)
        throw Error(ErrorKind::ConfigError, "temperature must be >= 0");
    if (max_in_flight < 1 || max_in_flight > 4096)
        throw Error(ErrorKind::ConfigError, "max_in_flight must lie in [1, 4096]");
    if (max_output_tokens < 1)
        throw Error(ErrorKind::ConfigError, "max_output_tokens must be >= 1");
    if (request_timeout_s < 1)
        throw Error(ErrorKind::ConfigError, "request_timeout must be >= 1s");
    if (max_retries < 0)
        throw Error(ErrorKind::ConfigError, "max_retries must be >= 0");
}

std::string render_onpolicy_prompt(const std::string& question,
                                   const std::vector<std::string>& steps,
                                   const OraclePromptTemplate& tpl) {
    tpl.validate();
    if (steps.empty())
        throw Error(ErrorKind::EmptySteps, "cannot render a prompt from zero steps");

    std::string joined;
    for (size_t i = 0; i < steps.size(); ++i) {
        if (i > 0) joined += tpl.joiner;
        joined += steps[i];
    }
    return detail::splice_two(tpl.text, kQuestionSlot, question, kStepsSlot, joined);
}

HttpChatClient::HttpChatClient(EndpointConfig cfg)
    : cfg_(std::move(cfg)), slots_(cfg_.max_in_flight > 0 ? cfg_.max_in_flight : 1) {
    cfg_.validate();
    if (cfg_.base_url.empty())
        throw Error(ErrorKind::ConfigError, "base_url required for the HTTP client");

    size_t scheme = cfg_.base_url.find("://");
    size_t slash = scheme == std::string::npos ? cfg_.base_url.find('/')
                                               : cfg_.base_url.find('/', scheme + 3);
    if (slash == std::string::npos) {
        origin_ = cfg_.base_url;
    } else {
        origin_ = cfg_.base_url.substr(0, slash);
        path_prefix_ = cfg_.base_url.substr(slash);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }

    if (!cfg_.api_key_env.empty()) {
        if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key) api_key_ = key;
    }
}

std::string HttpChatClient::complete(const std::string& prompt) {
    SlotGuard guard(slots_);

    json body = {{"model", cfg_.model_name},
                 {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
                 {"temperature", cfg_.temperature},
                 {"max_tokens", cfg_.max_output_tokens}};
    std::string payload = body.dump();

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(100LL << (attempt - 1)));

        httplib::Client cli(origin_);
        cli.set_connection_timeout(cfg_.request_timeout_s, 0);
        cli.set_read_timeout(cfg_.request_timeout_s, 0);
        cli.set_write_timeout(cfg_.request_timeout_s, 0);

        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        ++requests_;
        auto res = cli.Post(path_prefix_ + "/chat/completions", headers, payload,
                            "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded()) {
            last_error = "unparseable response body";
            continue;
        }
        try {
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            last_error = std::string("unexpected response shape: ") + e.what();
        }
    }
    throw Error(ErrorKind::EndpointError,
                last_error + " (after " + std::to_string(cfg_.max_retries + 1) + " attempts)");
}

OracleCache::OracleCache(std::filesystem::path path) : path_(std::move(path)) {
    namespace fs = std::filesystem;
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());

    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) continue;
        try {
            OracleCacheEntry e;
            e.key = j.at("key").get<std::string>();
            e.prefix_len = j.at("prefix_len").get<size_t>();
            e.valid = j.at("valid").get<bool>();
            if (j.contains("extracted") && !j["extracted"].is_null())
                e.extracted = j["extracted"].get<std::string>();
            e.extractor = j.value("extractor", "none");
            e.completion = j.value("completion", "");
            entries_[e.key] = std::move(e);
        } catch (const std::exception&) {
            continue;
        }
    }
}

std::optional<OracleCacheEntry> OracleCache::get(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void OracleCache::put(const OracleCacheEntry& entry) {
    std::lock_guard lock(mu_);
    std::ofstream out(path_, std::ios::app);
    if (!out) throw Error(ErrorKind::IoError, "cannot append to cache " + path_.string());
    out << cache_entry_to_json(entry).dump() << "\n";
    if (!out) throw Error(ErrorKind::IoError, "write to cache failed: " + path_.string());
    entries_[entry.key] = entry;
}

size_t OracleCache::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

std::string oracle_cache_key(const std::string& record_id, size_t prefix_len,
                             const std::string& model_name, const std::string& template_version,
                             const std::string& normalization_version,
                             const std::string& rendered_prompt) {
    return record_id + "|" + std::to_string(prefix_len) + "|" + model_name + "|" +
           template_version + "|" + normalization_version + "|" +
           hex64(stable_hash64(rendered_prompt));
}

ValidationVerdict validate_prefix(const std::string& record_id, const std::string& question,
                                  const std::vector<std::string>& steps, const std::string& gold,
                                  ChatClient& client, const OraclePromptTemplate& tpl,
                                  OracleCache* cache) {
    ValidationVerdict verdict;
    verdict.prefix_len = steps.size();
    verdict.rendered_prompt = render_onpolicy_prompt(question, steps, tpl);

    std::string key = oracle_cache_key(record_id, steps.size(), client.model_name(), tpl.version,
                                       kNormalizationVersion, verdict.rendered_prompt);
    if (cache) {
        if (auto hit = cache->get(key)) {
            verdict.raw_completion = hit->completion;
            verdict.extracted = hit->extracted;
            verdict.extractor = hit->extractor;
            verdict.valid = hit->valid;
            verdict.from_cache = true;
            return verdict;
        }
    }

    auto t0 = std::chrono::steady_clock::now();
    verdict.raw_completion = client.complete(verdict.rendered_prompt);
    verdict.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();

    verdict.extracted = extract_final_answer(verdict.raw_completion, ExtractionMode::OnPolicyMarker);
    verdict.extractor = "onpolicy-marker";
    if (!verdict.extracted) {
        verdict.extracted = extract_final_answer(verdict.raw_completion, ExtractionMode::Auto);
        verdict.extractor = verdict.extracted ? "auto-fallback" : "none";
    }
    verdict.valid = verdict.extracted && answers_match(*verdict.extracted, gold);

    if (cache)
        cache->put({key, verdict.prefix_len, verdict.valid, verdict.extracted, verdict.extractor,
                    verdict.raw_completion});
    return verdict;
}

}  // namespace cotrim
