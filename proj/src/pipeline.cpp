#include "cotrim/pipeline.hpp"

#include <ctime>
#include <fstream>
#include <memory>
#include <set>
#include <unordered_set>

#include "cotrim/parallel.hpp"
#include "cotrim/serialization.hpp"
#include "text_util.hpp"

namespace cotrim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string kebab_reason(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingOpenTag: return "missing-open-tag";
        case ErrorKind::MissingCloseTag: return "missing-close-tag";
        case ErrorKind::EmptyThinkBlock: return "empty-think-block";
        case ErrorKind::EmptySteps: return "empty-steps";
        case ErrorKind::TemplateInvalid: return "template-invalid";
        case ErrorKind::EndpointError: return "endpoint-error";
        case ErrorKind::KeptLenOutOfRange: return "kept-len-out-of-range";
        case ErrorKind::ZeroOriginal: return "zero-original";
        case ErrorKind::RatioOutOfRange: return "ratio-out-of-range";
        case ErrorKind::ScoreMissing: return "score-missing";
        case ErrorKind::ScoreOutOfRange: return "score-out-of-range";
        case ErrorKind::IoError: return "io-error";
        case ErrorKind::ConfigError: return "config-error";
    }
    return "unknown";
}

std::string iso_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::optional<std::string> scalar_field(const json& j, const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    const json& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return v.dump();
    if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
    return std::nullopt;
}

void endpoint_from_json(const json& j, EndpointConfig& e) {
    e.base_url = j.value("base_url", e.base_url);
    e.model_name = j.value("model_name", e.model_name);
    e.temperature = j.value("temperature", e.temperature);
    e.max_output_tokens = j.value("max_output_tokens", e.max_output_tokens);
    e.request_timeout_s = j.value("request_timeout_s", e.request_timeout_s);
    e.max_retries = j.value("max_retries", e.max_retries);
    e.max_in_flight = j.value("max_in_flight", e.max_in_flight);
    e.api_key_env = j.value("api_key_env", e.api_key_env);
}

json endpoint_to_json(const EndpointConfig& e) {
    return json{{"base_url", e.base_url},
                {"model_name", e.model_name},
                {"temperature", e.temperature},
                {"max_output_tokens", e.max_output_tokens},
                {"request_timeout_s", e.request_timeout_s},
                {"max_retries", e.max_retries},
                {"max_in_flight", e.max_in_flight},
                {"api_key_env", e.api_key_env}};
}

void require_input(const fs::path& input) {
    if (input.empty())
        throw Error(ErrorKind::ConfigError, "no input file configured");
    if (!fs::exists(input))
        throw Error(ErrorKind::ConfigError, "input not found: " + input.string());
}

fs::path distilled_path(const RunConfig& cfg) { return cfg.out_dir / "distilled.jsonl"; }
fs::path skips_path(const RunConfig& cfg) { return cfg.out_dir / "skips.jsonl"; }

}  // namespace

RunConfig RunConfig::load(const fs::path& config_path) {
    json j = read_json_file(config_path);
    if (!j.is_object())
        throw Error(ErrorKind::ConfigError, "config must be a JSON object");

    static const std::set<std::string> known = {
        "input",         "out_dir",       "field_map",      "segmentation",
        "oracle_endpoint", "eval_endpoint", "judge_endpoint", "search",
        "counter",       "oracle_template_text", "oracle_joiner", "eval",
        "workers",       "seed",          "cache_path"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw Error(ErrorKind::ConfigError, "unknown config key '" + key + "'");

    RunConfig cfg;
    cfg.input = j.value("input", std::string{});
    cfg.out_dir = j.value("out_dir", std::string{"out"});

    if (j.contains("field_map")) {
        const json& m = j.at("field_map");
        cfg.field_map.id = m.value("id", cfg.field_map.id);
        cfg.field_map.question = m.value("question", cfg.field_map.question);
        cfg.field_map.answer = m.value("answer", cfg.field_map.answer);
        cfg.field_map.response = m.value("response", cfg.field_map.response);
    }
    if (j.contains("segmentation")) {
        const json& s = j.at("segmentation");
        cfg.segmentation.think_open = s.value("think_open", cfg.segmentation.think_open);
        cfg.segmentation.think_close = s.value("think_close", cfg.segmentation.think_close);
        cfg.segmentation.step_separator =
            s.value("step_separator", cfg.segmentation.step_separator);
    }
    if (j.contains("oracle_endpoint")) endpoint_from_json(j.at("oracle_endpoint"), cfg.oracle_endpoint);
    if (j.contains("eval_endpoint")) endpoint_from_json(j.at("eval_endpoint"), cfg.eval_endpoint);
    if (j.contains("judge_endpoint")) endpoint_from_json(j.at("judge_endpoint"), cfg.judge_endpoint);

    if (j.contains("search")) {
        const json& s = j.at("search");
        if (s.contains("strategy")) cfg.search.strategy = parse_strategy(s.at("strategy").get<std::string>());
        if (s.contains("mode")) cfg.search.mode = parse_search_mode(s.at("mode").get<std::string>());
        cfg.search.precheck_full = s.value("precheck_full", cfg.search.precheck_full);
        cfg.search.random_keep_prob = s.value("random_keep_prob", cfg.search.random_keep_prob);
        cfg.search.random_validate = s.value("random_validate", cfg.search.random_validate);
    }
    if (j.contains("counter")) {
        const json& c = j.at("counter");
        if (c.contains("mode")) cfg.counter.mode = parse_token_counter_mode(c.at("mode").get<std::string>());
        cfg.counter.command = c.value("command", cfg.counter.command);
    }
    if (j.contains("oracle_template_text") && !j.at("oracle_template_text").is_null())
        cfg.oracle_template_text = j.at("oracle_template_text").get<std::string>();
    cfg.oracle_joiner = j.value("oracle_joiner", cfg.oracle_joiner);

    if (j.contains("eval")) {
        const json& e = j.at("eval");
        cfg.eval_instruction_prefix = e.value("instruction_prefix", cfg.eval_instruction_prefix);
        cfg.eval_exclude_failed = e.value("exclude_failed", cfg.eval_exclude_failed);
        if (e.contains("extraction"))
            cfg.eval_extraction = parse_extraction_mode(e.at("extraction").get<std::string>());
    }

    cfg.workers = j.value("workers", cfg.workers);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("cache_path") && !j.at("cache_path").is_null())
        cfg.cache_path = fs::path(j.at("cache_path").get<std::string>());

    cfg.validate_common();
    return cfg;
}

OraclePromptTemplate RunConfig::oracle_template() const {
    OraclePromptTemplate tpl;
    tpl.joiner = oracle_joiner;
    if (oracle_template_text) {
        tpl.text = *oracle_template_text;
        tpl.version = "custom-" + hex64(stable_hash64(tpl.text));
    }
    return tpl;
}

fs::path RunConfig::resolved_cache_path() const {
    return cache_path ? *cache_path : out_dir / "oracle-cache.jsonl";
}

json RunConfig::snapshot() const {
    return json{
        {"input", input.string()},
        {"out_dir", out_dir.string()},
        {"field_map",
         json{{"id", field_map.id},
              {"question", field_map.question},
              {"answer", field_map.answer},
              {"response", field_map.response}}},
        {"segmentation",
         json{{"think_open", segmentation.think_open},
              {"think_close", segmentation.think_close},
              {"step_separator", segmentation.step_separator}}},
        {"oracle_endpoint", endpoint_to_json(oracle_endpoint)},
        {"eval_endpoint", endpoint_to_json(eval_endpoint)},
        {"judge_endpoint", endpoint_to_json(judge_endpoint)},
        {"search",
         json{{"strategy", std::string(strategy_name(search.strategy))},
              {"mode", search_mode_name(search.mode)},
              {"precheck_full", search.precheck_full},
              {"random_keep_prob", search.random_keep_prob},
              {"random_validate", search.random_validate}}},
        {"counter",
         json{{"mode", token_counter_mode_name(counter.mode)}, {"command", counter.command}}},
        {"oracle_template_text",
         oracle_template_text ? json(*oracle_template_text) : json(nullptr)},
        {"oracle_joiner", oracle_joiner},
        {"eval",
         json{{"instruction_prefix", eval_instruction_prefix},
              {"exclude_failed", eval_exclude_failed},
              {"extraction", extraction_mode_name(eval_extraction)}}},
        {"workers", workers},
        {"seed", seed},
        {"cache_path", resolved_cache_path().string()},
    };
}

void RunConfig::validate_common() const {
    segmentation.validate();
    search.validate();
    oracle_template().validate();
    if (workers < 1) throw Error(ErrorKind::ConfigError, "workers must be >= 1");
    if (out_dir.empty()) throw Error(ErrorKind::ConfigError, "out_dir must be set");
}

std::vector<SourceRecord> load_corpus(const fs::path& input, const FieldMap& map,
                                      std::vector<SkipEntry>& skips) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + input.string());

    std::vector<SourceRecord> records;
    std::unordered_set<std::string> seen;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim_view(line).empty()) continue;
        std::string line_tag = "line " + std::to_string(line_no);

        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            skips.push_back({"line-" + std::to_string(line_no), "prune", "unparseable-json",
                             line_tag, ""});
            continue;
        }

        std::string fallback_id =
            scalar_field(j, map.id).value_or("line-" + std::to_string(line_no));
        auto question = scalar_field(j, map.question);
        auto answer = scalar_field(j, map.answer);
        auto response = scalar_field(j, map.response);
        if (!question || !answer || !response) {
            skips.push_back({fallback_id, "prune", "missing-field",
                             line_tag + ": need " + map.question + "/" + map.answer + "/" +
                                 map.response,
                             ""});
            continue;
        }

        SourceRecord rec;
        rec.question = *question;
        rec.raw_response = *response;
        rec.gold_answer = detail::trim(*answer);
        if (rec.gold_answer.empty()) {
            skips.push_back({fallback_id, "prune", "empty-gold-answer", line_tag, ""});
            continue;
        }
        rec.id = scalar_field(j, map.id).value_or("");
        if (rec.id.empty()) rec.id = derive_record_id(rec.question, rec.raw_response);
        if (!seen.insert(rec.id).second) {
            skips.push_back({rec.id, "prune", "duplicate-id", line_tag, ""});
            continue;
        }
        for (const auto& [key, value] : j.items()) {
            if (key == map.id || key == map.question || key == map.answer || key == map.response)
                continue;
            rec.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<BenchItem> load_bench(const fs::path& input, const FieldMap& map) {
    auto lines = read_jsonl(input);
    std::vector<BenchItem> items;
    items.reserve(lines.size());
    for (size_t i = 0; i < lines.size(); ++i) {
        const json& j = lines[i];
        std::string tag = input.string() + " item " + std::to_string(i + 1);
        auto question = scalar_field(j, map.question);
        auto answer = scalar_field(j, map.answer);
        if (!question || !answer || detail::trim_view(*answer).empty())
            throw Error(ErrorKind::IoError,
                        tag + ": needs non-empty " + map.question + " and " + map.answer);
        BenchItem item;
        item.question = *question;
        item.gold_answer = detail::trim(*answer);
        item.id = scalar_field(j, map.id).value_or("");
        if (item.id.empty()) item.id = "item-" + hex64(stable_hash64(item.question));
        items.push_back(std::move(item));
    }
    return items;
}

PruneRun run_prune(const RunConfig& cfg, ChatClient* oracle_client) {
    cfg.validate_common();
    require_input(cfg.input);
    OraclePromptTemplate tpl = cfg.oracle_template();

    // Unvalidated random deletion is the one offline strategy.
    bool needs_oracle =
        cfg.search.strategy != Strategy::Random || cfg.search.random_validate;
    std::unique_ptr<HttpChatClient> owned;
    ChatClient* client = oracle_client;
    if (!client && needs_oracle) {
        owned = std::make_unique<HttpChatClient>(cfg.oracle_endpoint);
        client = owned.get();
    }

    fs::create_directories(cfg.out_dir);
    OracleCache cache(cfg.resolved_cache_path());

    std::vector<SkipEntry> ingest_skips;
    std::vector<SourceRecord> records = load_corpus(cfg.input, cfg.field_map, ingest_skips);

    std::vector<std::optional<DistilledRow>> rows(records.size());
    std::vector<std::optional<SkipEntry>> record_skips(records.size());
    std::string strategy(strategy_name(cfg.search.strategy));

    parallel_for(records.size(), cfg.workers, [&](size_t i) {
        const SourceRecord& rec = records[i];
        try {
            ReasoningTrace trace = parse_response(rec.raw_response, cfg.segmentation);

            PrefixOracle prefix_oracle = [&](size_t k) {
                std::vector<std::string> prefix(trace.steps.begin(),
                                                trace.steps.begin() + static_cast<long>(k));
                return validate_prefix(rec.id, rec.question, prefix, rec.gold_answer, *client,
                                       tpl, &cache)
                    .valid;
            };

            PruneOutcome outcome;
            switch (cfg.search.strategy) {
                case Strategy::BinaryCut:
                    outcome = binary_cut(trace, prefix_oracle, cfg.search);
                    break;
                case Strategy::Fcs:
                    outcome = fcs_cut(trace, prefix_oracle, cfg.search);
                    break;
                case Strategy::Random: {
                    StepsOracle steps_oracle;
                    if (client) {
                        steps_oracle = [&](const std::vector<std::string>& kept) {
                            return validate_prefix(rec.id, rec.question, kept, rec.gold_answer,
                                                   *client, tpl, &cache)
                                .valid;
                        };
                    }
                    outcome = random_cut(trace, stable_hash64(rec.id, cfg.seed),
                                         cfg.search.random_keep_prob, cfg.search.random_validate,
                                         steps_oracle);
                    break;
                }
            }

            if (outcome.status == PruneStatus::Pruned || outcome.status == PruneStatus::KeptFull) {
                DistilledRow row;
                row.strategy = outcome.strategy;
                row.status = outcome.status;
                row.oracle_calls_count = outcome.oracle_calls.size();
                row.kept_indices = outcome.kept_indices;

                DistilledRecord& d = row.record;
                d.id = rec.id;
                d.question = rec.question;
                d.full_response = rec.raw_response;
                d.orig_steps = trace.step_count();

                std::vector<std::string> kept_steps;
                if (outcome.strategy == Strategy::Random) {
                    d.pruned_response =
                        build_pruned_response(trace, outcome.kept_indices, cfg.segmentation);
                    for (size_t idx : outcome.kept_indices)
                        kept_steps.push_back(trace.steps[idx - 1]);
                } else {
                    d.pruned_response =
                        build_pruned_response(trace, *outcome.kept_len, cfg.segmentation);
                    kept_steps.assign(trace.steps.begin(),
                                      trace.steps.begin() + static_cast<long>(*outcome.kept_len));
                }
                d.kept_steps = kept_steps.size();
                d.orig_tokens = static_cast<int64_t>(
                    cfg.counter.count(join_steps(trace.steps, cfg.segmentation)));
                d.kept_tokens = static_cast<int64_t>(
                    cfg.counter.count(join_steps(kept_steps, cfg.segmentation)));
                d.ratio = d.orig_tokens > 0
                              ? static_cast<double>(d.kept_tokens) /
                                    static_cast<double>(d.orig_tokens)
                              : 0.0;
                rows[i] = std::move(row);
            } else {
                std::string reason = outcome.status == PruneStatus::Failed
                                         ? "endpoint-failed"
                                         : "rejected-full-invalid";
                record_skips[i] =
                    SkipEntry{rec.id, "prune", reason, outcome.error_detail.value_or(""),
                              strategy};
            }
        } catch (const Error& e) {
            record_skips[i] = SkipEntry{rec.id, "prune", kebab_reason(e.kind()), e.what(),
                                        strategy};
        }
    });

    size_t n_ingest_skips = ingest_skips.size();
    std::vector<DistilledRow> distilled;
    std::vector<SkipEntry> skips = std::move(ingest_skips);
    for (size_t i = 0; i < records.size(); ++i) {
        if (rows[i]) distilled.push_back(std::move(*rows[i]));
        if (record_skips[i]) skips.push_back(std::move(*record_skips[i]));
    }

    PruneRun result;
    result.n_input = records.size() + n_ingest_skips;
    result.n_distilled = distilled.size();
    result.n_skipped = skips.size();
    result.distilled_path = distilled_path(cfg);
    result.skips_path = skips_path(cfg);
    result.manifest_path = cfg.out_dir / "run-manifest.json";
    if (owned) result.endpoint_requests = owned->request_count();

    write_jsonl(result.distilled_path, distilled);
    write_jsonl(result.skips_path, skips);

    json snapshot = cfg.snapshot();
    json manifest{{"schema", 1},
                  {"created_utc", iso_utc_now()},
                  {"config", snapshot},
                  {"config_hash", hex64(stable_hash64(snapshot.dump()))},
                  {"versions",
                   json{{"normalization", kNormalizationVersion},
                        {"template", tpl.version},
                        {"cache_schema", 1}}},
                  {"counts",
                   json{{"input", result.n_input},
                        {"distilled", result.n_distilled},
                        {"skipped", result.n_skipped}}}};
    if (result.endpoint_requests) manifest["endpoint_requests"] = *result.endpoint_requests;
    write_json_file(result.manifest_path, manifest);
    return result;
}

DryRun run_dry(const RunConfig& cfg) {
    cfg.validate_common();
    require_input(cfg.input);
    OraclePromptTemplate tpl = cfg.oracle_template();

    std::vector<SkipEntry> skips;
    std::vector<SourceRecord> records = load_corpus(cfg.input, cfg.field_map, skips);

    DryRun dry;
    dry.n_records = records.size();
    for (const auto& rec : records) {
        try {
            ReasoningTrace trace = parse_response(rec.raw_response, cfg.segmentation);
            dry.sample_id = rec.id;
            dry.sample_prompt = render_onpolicy_prompt(rec.question, trace.steps, tpl);
            break;
        } catch (const Error&) {
            continue;
        }
    }
    return dry;
}

EmitResult run_emit(const RunConfig& cfg, std::string_view kind) {
    cfg.validate_common();
    fs::path source = distilled_path(cfg);
    if (!fs::exists(source))
        throw Error(ErrorKind::ConfigError,
                    source.string() + " not found; run the prune stage first");
    auto rows = read_jsonl_as<DistilledRow>(source);

    EmitResult result;
    if (kind == "sft") {
        result = emit_sft(rows, cfg.out_dir / "sft.jsonl", cfg.segmentation);
    } else if (kind == "dpo") {
        result = emit_dpo(rows, cfg.out_dir / "dpo.jsonl", cfg.counter, cfg.segmentation);
    } else {
        throw Error(ErrorKind::ConfigError, "emit kind must be 'sft' or 'dpo'");
    }

    std::vector<SkipEntry> skips;
    if (fs::exists(skips_path(cfg))) skips = read_jsonl_as<SkipEntry>(skips_path(cfg));
    std::erase_if(skips, [&](const SkipEntry& s) { return s.stage == kind; });
    skips.insert(skips.end(), result.skips.begin(), result.skips.end());
    write_jsonl(skips_path(cfg), skips);
    return result;
}

std::map<std::string, StrategyStats> run_stats(const RunConfig& cfg) {
    cfg.validate_common();
    fs::path source = distilled_path(cfg);
    if (!fs::exists(source))
        throw Error(ErrorKind::ConfigError,
                    source.string() + " not found; run the prune stage first");
    auto rows = read_jsonl_as<DistilledRow>(source);
    std::vector<SkipEntry> skips;
    if (fs::exists(skips_path(cfg))) skips = read_jsonl_as<SkipEntry>(skips_path(cfg));

    std::map<std::string, std::vector<DistilledRecord>> by_strategy;
    for (const auto& row : rows)
        by_strategy[std::string(strategy_name(row.strategy))].push_back(row.record);

    std::map<std::string, size_t> rejected;
    for (const auto& s : skips)
        if (s.stage == "prune" && s.reason == "rejected-full-invalid" && !s.strategy.empty())
            ++rejected[s.strategy];
    for (const auto& [name, _] : rejected) by_strategy.try_emplace(name);

    std::map<std::string, StrategyStats> stats;
    json strategies = json::object();
    for (const auto& [name, recs] : by_strategy) {
        StrategyStats s = compute_strategy_stats(parse_strategy(name), recs,
                                                 rejected.count(name) ? rejected[name] : 0);
        strategies[name] = s;
        stats[name] = std::move(s);
    }

    json report{{"schema", 1}, {"strategies", strategies}};
    write_json_file(cfg.out_dir / "stats-report.json", report);
    return stats;
}

EvalReport run_eval(const RunConfig& cfg, ChatClient* client) {
    cfg.validate_common();
    require_input(cfg.input);
    auto items = load_bench(cfg.input, cfg.field_map);

    std::unique_ptr<HttpChatClient> owned;
    if (!client) {
        owned = std::make_unique<HttpChatClient>(cfg.eval_endpoint);
        client = owned.get();
    }

    fs::create_directories(cfg.out_dir);
    EvalOptions opts;
    opts.instruction_prefix = cfg.eval_instruction_prefix;
    opts.exclude_failed = cfg.eval_exclude_failed;
    opts.extraction = cfg.eval_extraction;
    opts.workers = cfg.workers;
    opts.verdicts_path = cfg.out_dir / "eval-verdicts.jsonl";

    EvalReport report = evaluate(items, *client, cfg.counter, opts, cfg.segmentation);

    json j = report;
    j.erase("per_item");
    j["schema"] = 1;
    j["per_item_file"] = "eval-verdicts.jsonl";
    write_json_file(cfg.out_dir / "eval-report.json", j);
    return report;
}

JudgeRun run_judge(const RunConfig& cfg, ChatClient* client) {
    cfg.validate_common();
    require_input(cfg.input);
    auto lines = read_jsonl(cfg.input);

    struct JudgeItem {
        std::string id;
        std::string question;
        std::string response;
    };
    std::vector<JudgeItem> items;
    for (size_t i = 0; i < lines.size(); ++i) {
        const json& j = lines[i];
        auto question = scalar_field(j, cfg.field_map.question);
        auto response = scalar_field(j, cfg.field_map.response);
        if (!question || !response || response->empty())
            throw Error(ErrorKind::IoError, cfg.input.string() + " item " +
                                                std::to_string(i + 1) +
                                                ": needs question and non-empty response");
        std::string id = scalar_field(j, cfg.field_map.id)
                             .value_or("item-" + hex64(stable_hash64(*response)));
        items.push_back({std::move(id), std::move(*question), std::move(*response)});
    }
    if (items.empty()) throw Error(ErrorKind::ConfigError, "no items to judge");

    std::unique_ptr<HttpChatClient> owned;
    if (!client) {
        owned = std::make_unique<HttpChatClient>(cfg.judge_endpoint);
        client = owned.get();
    }

    fs::create_directories(cfg.out_dir);
    JudgeTemplate tpl;
    std::vector<std::optional<int>> scores(items.size());
    std::vector<std::string> errors(items.size());

    parallel_for(items.size(), cfg.workers, [&](size_t i) {
        try {
            scores[i] = judge_score(items[i].question, items[i].response, *client, tpl);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EndpointError && e.kind() != ErrorKind::ScoreMissing &&
                e.kind() != ErrorKind::ScoreOutOfRange)
                throw;
            errors[i] = e.what();
        }
    });

    JudgeRun result;
    double sum = 0.0;
    std::vector<json> verdicts;
    verdicts.reserve(items.size());
    for (size_t i = 0; i < items.size(); ++i) {
        if (scores[i]) {
            sum += *scores[i];
            ++result.n_scored;
        } else {
            ++result.n_failed;
        }
        verdicts.push_back(json{{"id", items[i].id},
                                {"score", scores[i] ? json(*scores[i]) : json(nullptr)},
                                {"error", errors[i].empty() ? json(nullptr) : json(errors[i])}});
    }
    result.mean_score = result.n_scored > 0 ? sum / static_cast<double>(result.n_scored) : 0.0;

    write_jsonl(cfg.out_dir / "judge-verdicts.jsonl", verdicts);
    json report{{"schema", 1},
                {"mean_score", result.mean_score},
                {"n_scored", result.n_scored},
                {"n_failed", result.n_failed},
                {"per_item_file", "judge-verdicts.jsonl"}};
    write_json_file(cfg.out_dir / "judge-report.json", report);
    return result;
}

}  // namespace cotrim
