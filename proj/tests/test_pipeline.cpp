#include <doctest.h>

#include <regex>
#include <set>

#include "cotrim/pipeline.hpp"
#include "cotrim/serialization.hpp"
#include "support/mock_endpoint.hpp"
#include "support/test_util.hpp"

using namespace cotrim;
using cotrim::testing::ScriptedClient;
using cotrim::testing::TempDir;
using cotrim::testing::prompt_prefix_len;
using cotrim::testing::read_file;
using cotrim::testing::throws_kind;
using cotrim::testing::write_file;
using nlohmann::json;

namespace {

// Builds one corpus record whose validity threshold and gold answer are
// recoverable from any rendered prompt: the question carries both.
json corpus_record(int i, size_t n_steps, size_t k_star) {
    int gold = 100 + i;
    std::string think = "<think>\n";
    for (size_t s = 1; s <= n_steps; ++s) {
        if (s > 1) think += "\n\n";
        think += "step " + std::to_string(s) + " of record " + std::to_string(i);
    }
    think += "\n</think>\n\nSo the result is " + std::to_string(gold) + ".";
    return json{{"id", "rec-" + std::to_string(i)},
                {"question", "Problem " + std::to_string(i) + "? k=" + std::to_string(k_star) +
                                 " the answer is " + std::to_string(gold)},
                {"answer", std::to_string(gold)},
                {"response", think}};
}

std::string corpus_text(const std::vector<json>& records) {
    std::string text;
    for (const auto& r : records) text += r.dump() + "\n";
    return text;
}

// Oracle double: valid iff the prompt's step count reaches the k= threshold
// embedded in the question.
cotrim::testing::PromptHandler corpus_handler() {
    return [](const std::string& prompt) {
        static const std::regex k_re(R"(k=([0-9]+))");
        static const std::regex gold_re(R"(the answer is ([0-9]+))");
        std::smatch m;
        size_t k_star = std::regex_search(prompt, m, k_re) ? std::stoul(m[1].str()) : 1;
        std::string gold =
            std::regex_search(prompt, m, gold_re) ? m[1].str() : std::string("0");
        return prompt_prefix_len(prompt) >= k_star ? "###Answer: " + gold
                                                   : "###Answer: not yet";
    };
}

RunConfig base_config(const TempDir& dir, const std::string& corpus) {
    RunConfig cfg;
    cfg.input = dir / "corpus.jsonl";
    cfg.out_dir = dir / "out";
    cfg.workers = 3;
    write_file(cfg.input, corpus);
    return cfg;
}

}  // namespace

TEST_CASE("run config loads from json with overrides and rejects unknown keys") {
    TempDir dir("cfg");
    json j{{"input", "corpus.jsonl"},
           {"out_dir", "results"},
           {"field_map", {{"question", "prompt_text"}}},
           {"segmentation", {{"step_separator", "\n"}}},
           {"oracle_endpoint",
            {{"base_url", "http://h:1/v1"}, {"model_name", "m"}, {"max_in_flight", 7}}},
           {"search", {{"strategy", "fcs"}, {"mode", "strict-binary"}, {"precheck_full", false}}},
           {"counter", {{"mode", "char-approx"}}},
           {"eval", {{"instruction_prefix", "Be brief."}, {"exclude_failed", true},
                     {"extraction", "boxed"}}},
           {"workers", 2},
           {"seed", 99}};
    write_file(dir / "config.json", j.dump(2));

    RunConfig cfg = RunConfig::load(dir / "config.json");
    CHECK(cfg.input == "corpus.jsonl");
    CHECK(cfg.out_dir == "results");
    CHECK(cfg.field_map.question == "prompt_text");
    CHECK(cfg.field_map.answer == "answer");  // unmapped fields keep defaults
    CHECK(cfg.segmentation.step_separator == "\n");
    CHECK(cfg.oracle_endpoint.base_url == "http://h:1/v1");
    CHECK(cfg.oracle_endpoint.max_in_flight == 7);
    CHECK(cfg.search.strategy == Strategy::Fcs);
    CHECK(cfg.search.mode == SearchMode::StrictBinary);
    CHECK_FALSE(cfg.search.precheck_full);
    CHECK(cfg.counter.mode == TokenCounterMode::CharApprox);
    CHECK(cfg.eval_instruction_prefix == "Be brief.");
    CHECK(cfg.eval_exclude_failed);
    CHECK(cfg.eval_extraction == ExtractionMode::Boxed);
    CHECK(cfg.workers == 2);
    CHECK(cfg.seed == 99);

    write_file(dir / "bad.json", R"({"inupt": "typo.jsonl"})");
    CHECK(throws_kind(ErrorKind::ConfigError, [&] { RunConfig::load(dir / "bad.json"); }));

    write_file(dir / "bad2.json", R"({"search": {"strategy": "quantum"}})");
    CHECK(throws_kind(ErrorKind::ConfigError, [&] { RunConfig::load(dir / "bad2.json"); }));

    write_file(dir / "bad3.json", R"({"workers": 0})");
    CHECK(throws_kind(ErrorKind::ConfigError, [&] { RunConfig::load(dir / "bad3.json"); }));

    write_file(dir / "bad4.json", R"({"oracle_template_text": "missing placeholders"})");
    CHECK(throws_kind(ErrorKind::TemplateInvalid, [&] { RunConfig::load(dir / "bad4.json"); }));
}

TEST_CASE("custom oracle template text gets a content-derived version tag") {
    RunConfig cfg;
    CHECK(cfg.oracle_template().version == "onpolicy-v1");
    cfg.oracle_template_text = "Q {question} steps {thinking_steps}";
    std::string v1 = cfg.oracle_template().version;
    CHECK(v1.rfind("custom-", 0) == 0);
    cfg.oracle_template_text = "Q {question} STEPS {thinking_steps}";
    CHECK(cfg.oracle_template().version != v1);
}

TEST_CASE("load_corpus skips bad lines and keeps provenance metadata") {
    TempDir dir("corpus");
    std::string text;
    text += corpus_record(1, 4, 2).dump() + "\n";
    text += "this is not json\n";
    text += json{{"id", "no-question"}, {"answer", "1"}, {"response", "r"}}.dump() + "\n";
    text += json{{"id", "blank-gold"}, {"question", "q"}, {"answer", "  "},
                 {"response", "r"}}
                .dump() +
            "\n";
    text += corpus_record(1, 4, 2).dump() + "\n";  // duplicate id rec-1
    text += json{{"question", "derive me"}, {"answer", "5"}, {"response", "<think>\nx\n</think>\ny"},
                 {"difficulty", 3}, {"source", "unit"}}
                .dump() +
            "\n";
    auto path = dir / "corpus.jsonl";
    write_file(path, text);

    std::vector<SkipEntry> skips;
    auto records = load_corpus(path, FieldMap{}, skips);
    REQUIRE(records.size() == 2);
    CHECK(records[0].id == "rec-1");
    CHECK(records[0].gold_answer == "101");
    // Record without an id gets a content-derived one.
    CHECK(records[1].id == derive_record_id(records[1].question, records[1].raw_response));
    CHECK(records[1].meta.at("source") == "unit");
    CHECK(records[1].meta.at("difficulty") == "3");
    CHECK_FALSE(records[1].meta.count("question"));

    REQUIRE(skips.size() == 4);
    CHECK(skips[0].reason == "unparseable-json");
    CHECK(skips[0].stage == "prune");
    CHECK(skips[1].id == "no-question");
    CHECK(skips[1].reason == "missing-field");
    CHECK(skips[2].id == "blank-gold");
    CHECK(skips[2].reason == "empty-gold-answer");
    CHECK(skips[3].id == "rec-1");
    CHECK(skips[3].reason == "duplicate-id");
}

TEST_CASE("load_bench is strict about its fixture files") {
    TempDir dir("bench");
    write_file(dir / "good.jsonl",
               json{{"id", "b1"}, {"question", "Q?"}, {"answer", "7"}}.dump() + "\n" +
                   json{{"question", "Q2?"}, {"answer", "8"}}.dump() + "\n");
    auto items = load_bench(dir / "good.jsonl", FieldMap{});
    REQUIRE(items.size() == 2);
    CHECK(items[0].id == "b1");
    CHECK(items[1].id.rfind("item-", 0) == 0);

    write_file(dir / "bad.jsonl", json{{"question", "Q?"}}.dump() + "\n");
    CHECK(throws_kind(ErrorKind::IoError, [&] { load_bench(dir / "bad.jsonl", FieldMap{}); }));
}

TEST_CASE("run_prune distills a mixed corpus with statuses matching a linear reference") {
    TempDir dir("prune");
    std::vector<json> records;
    // Thresholds 1..8 over n=8, one never-valid record, one malformed record.
    for (int i = 1; i <= 8; ++i) records.push_back(corpus_record(i, 8, static_cast<size_t>(i)));
    records.push_back(corpus_record(9, 8, 999));  // no valid prefix
    json malformed{{"id", "rec-10"},
                   {"question", "Problem 10? k=1 the answer is 110"},
                   {"answer", "110"},
                   {"response", "thinking without tags"}};
    records.push_back(malformed);

    RunConfig cfg = base_config(dir, corpus_text(records));
    ScriptedClient client(corpus_handler());
    PruneRun run = run_prune(cfg, &client);

    CHECK(run.n_input == 10);
    CHECK(run.n_distilled == 8);
    CHECK(run.n_skipped == 2);
    CHECK_FALSE(run.endpoint_requests.has_value());  // injected client

    auto rows = read_jsonl_as<DistilledRow>(run.distilled_path);
    REQUIRE(rows.size() == 8);
    for (const auto& row : rows) {
        // Linear-scan reference: records 1..8 have a valid prefix, so none
        // may be rejected; the returned prefix must reach the threshold.
        size_t k_star = 0;
        std::smatch m;
        static const std::regex k_re(R"(k=([0-9]+))");
        std::string q = row.record.question;
        REQUIRE(std::regex_search(q, m, k_re));
        k_star = std::stoul(m[1].str());
        REQUIRE((row.status == PruneStatus::Pruned || row.status == PruneStatus::KeptFull));
        CHECK(row.record.kept_steps >= k_star);
        CHECK(row.record.kept_steps <= row.record.orig_steps);
        CHECK(row.record.orig_steps == 8);
        CHECK(row.oracle_calls_count >= 1);
        CHECK(row.record.ratio == doctest::Approx(static_cast<double>(row.record.kept_tokens) /
                                                  static_cast<double>(row.record.orig_tokens)));
        // The distilled text is parseable and matches the recorded step count.
        ReasoningTrace back = parse_response(row.record.pruned_response, cfg.segmentation);
        CHECK(back.step_count() == row.record.kept_steps);
    }

    auto skips = read_jsonl_as<SkipEntry>(run.skips_path);
    REQUIRE(skips.size() == 2);
    std::map<std::string, std::string> by_id;
    for (const auto& s : skips) by_id[s.id] = s.reason;
    CHECK(by_id.at("rec-9") == "rejected-full-invalid");
    CHECK(by_id.at("rec-10") == "missing-open-tag");

    json manifest = read_json_file(run.manifest_path);
    CHECK(manifest.at("counts").at("input") == 10);
    CHECK(manifest.at("counts").at("distilled") == 8);
    CHECK(manifest.at("counts").at("skipped") == 2);
    CHECK(manifest.at("versions").at("normalization") == "norm-v1");
    CHECK(manifest.at("versions").at("template") == "onpolicy-v1");
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.at("config").at("search").at("strategy") == "binary");
}

TEST_CASE("run_prune rerun answers entirely from the cache") {
    TempDir dir("warm");
    std::vector<json> records;
    for (int i = 1; i <= 5; ++i) records.push_back(corpus_record(i, 6, static_cast<size_t>(i)));
    RunConfig cfg = base_config(dir, corpus_text(records));

    ScriptedClient first_client(corpus_handler());
    run_prune(cfg, &first_client);
    CHECK(first_client.calls() > 0);
    std::string first_bytes = read_file(cfg.out_dir / "distilled.jsonl");
    CHECK_FALSE(first_bytes.empty());

    ScriptedClient second_client(corpus_handler());
    run_prune(cfg, &second_client);
    CHECK(second_client.calls() == 0);
    CHECK(read_file(cfg.out_dir / "distilled.jsonl") == first_bytes);
}

TEST_CASE("run_prune with the random strategy needs no oracle and is seed-stable") {
    TempDir dir("random");
    std::vector<json> records;
    for (int i = 1; i <= 4; ++i) records.push_back(corpus_record(i, 20, 1));
    RunConfig cfg = base_config(dir, corpus_text(records));
    cfg.search.strategy = Strategy::Random;
    cfg.seed = 7;

    PruneRun run = run_prune(cfg);  // no client at all
    CHECK(run.n_distilled == 4);
    std::string bytes = read_file(cfg.out_dir / "distilled.jsonl");

    auto rows = read_jsonl_as<DistilledRow>(run.distilled_path);
    for (const auto& row : rows) {
        REQUIRE(!row.kept_indices.empty());
        CHECK(row.kept_indices.front() == 1);
        CHECK(row.kept_indices.back() == 20);
        CHECK(row.oracle_calls_count == 0);
    }

    run_prune(cfg);
    CHECK(read_file(cfg.out_dir / "distilled.jsonl") == bytes);

    cfg.seed = 8;
    run_prune(cfg);
    CHECK(read_file(cfg.out_dir / "distilled.jsonl") != bytes);
}

TEST_CASE("run_dry renders one sample prompt without any client") {
    TempDir dir("dry");
    std::vector<json> records;
    records.push_back(corpus_record(1, 3, 2));
    records.push_back(corpus_record(2, 3, 2));
    RunConfig cfg = base_config(dir, corpus_text(records));

    DryRun dry = run_dry(cfg);
    CHECK(dry.n_records == 2);
    CHECK(dry.sample_id == "rec-1");
    CHECK(dry.sample_prompt.find("Problem 1?") != std::string::npos);
    CHECK(dry.sample_prompt.find("step 3 of record 1") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(cfg.out_dir / "distilled.jsonl"));
}

TEST_CASE("run_emit folds its skip entries idempotently") {
    TempDir dir("emit");
    std::vector<json> records;
    for (int i = 1; i <= 4; ++i) records.push_back(corpus_record(i, 6, static_cast<size_t>(i)));
    records.push_back(corpus_record(5, 6, 999));  // rejected at prune time
    RunConfig cfg = base_config(dir, corpus_text(records));

    ScriptedClient client(corpus_handler());
    run_prune(cfg, &client);

    EmitResult sft = run_emit(cfg, "sft");
    CHECK(sft.written == 4);
    auto sft_rows = read_jsonl_as<SftRecord>(cfg.out_dir / "sft.jsonl");
    CHECK(sft_rows.size() == 4);

    EmitResult dpo = run_emit(cfg, "dpo");
    CHECK(dpo.written >= 3);  // a threshold at n can legitimately stay KeptFull

    auto count_stage = [&](const std::string& stage) {
        size_t n = 0;
        for (const auto& s : read_jsonl_as<SkipEntry>(cfg.out_dir / "skips.jsonl"))
            if (s.stage == stage) ++n;
        return n;
    };
    size_t sft_skips = count_stage("sft");
    size_t dpo_skips = count_stage("dpo");
    size_t prune_skips = count_stage("prune");
    CHECK(prune_skips == 1);

    // Re-running either stage must not duplicate its skip entries.
    run_emit(cfg, "sft");
    run_emit(cfg, "dpo");
    CHECK(count_stage("sft") == sft_skips);
    CHECK(count_stage("dpo") == dpo_skips);
    CHECK(count_stage("prune") == 1);

    CHECK(throws_kind(ErrorKind::ConfigError, [&] { run_emit(cfg, "csv"); }));
}

TEST_CASE("run_stats writes one strategy block with consistent bins") {
    TempDir dir("stats");
    std::vector<json> records;
    for (int i = 1; i <= 6; ++i) records.push_back(corpus_record(i, 8, static_cast<size_t>(i)));
    records.push_back(corpus_record(7, 8, 999));
    RunConfig cfg = base_config(dir, corpus_text(records));

    ScriptedClient client(corpus_handler());
    run_prune(cfg, &client);
    auto stats = run_stats(cfg);

    REQUIRE(stats.count("binary"));
    const StrategyStats& s = stats.at("binary");
    CHECK(s.n_records == 6);
    CHECK(s.n_rejected == 1);
    CHECK(s.orig_mean > 0.0);
    CHECK(s.ratio > 0.0);
    CHECK(s.ratio <= 100.0);
    size_t total = 0;
    for (size_t b : s.bins) total += b;
    CHECK(total == 6);

    json report = read_json_file(cfg.out_dir / "stats-report.json");
    CHECK(report.at("strategies").at("binary").at("n_records") == 6);
    CHECK(report.at("strategies").at("binary").at("ratio") == doctest::Approx(s.ratio));
}

TEST_CASE("run_eval writes a report plus a resumable verdict trail") {
    TempDir dir("eval-run");
    std::string bench;
    for (int i = 1; i <= 10; ++i)
        bench += json{{"id", "b" + std::to_string(i)},
                      {"question", "Q" + std::to_string(i) + "? the answer is " +
                                       std::to_string(i)},
                      {"answer", std::to_string(i)}}
                     .dump() +
                 "\n";
    RunConfig cfg = base_config(dir, bench);

    ScriptedClient client([](const std::string& prompt) {
        std::smatch m;
        static const std::regex re(R"(the answer is ([0-9]+))");
        std::regex_search(prompt, m, re);
        int idx = std::stoi(m[1].str());
        std::string num = idx <= 7 ? m[1].str() : std::string("0");
        return "<think>\nwork\n</think>\n\n###Answer: " + num;
    });

    EvalReport report = run_eval(cfg, &client);
    CHECK(report.n_items == 10);
    CHECK(report.n_correct == 7);
    CHECK(report.accuracy == doctest::Approx(70.0));

    json file_report = read_json_file(cfg.out_dir / "eval-report.json");
    CHECK(file_report.at("accuracy") == doctest::Approx(70.0));
    CHECK(file_report.at("per_item_file") == "eval-verdicts.jsonl");
    CHECK_FALSE(file_report.contains("per_item"));

    auto verdicts = read_jsonl_as<ItemVerdict>(cfg.out_dir / "eval-verdicts.jsonl");
    CHECK(verdicts.size() == 10);

    ScriptedClient cold([](const std::string&) -> std::string {
        throw Error(ErrorKind::EndpointError, "must not be called");
    });
    EvalReport resumed = run_eval(cfg, &cold);
    CHECK(resumed.accuracy == doctest::Approx(70.0));
    CHECK(resumed.n_failed == 0);
}

TEST_CASE("run_judge scores rows and reports the arithmetic mean") {
    TempDir dir("judge-run");
    std::string rows;
    rows += json{{"id", "a"}, {"question", "Q1"}, {"response", "great answer"}}.dump() + "\n";
    rows += json{{"id", "b"}, {"question", "Q2"}, {"response", "weak answer"}}.dump() + "\n";
    rows += json{{"id", "c"}, {"question", "Q3"}, {"response", "no score emitted"}}.dump() + "\n";
    RunConfig cfg = base_config(dir, rows);

    ScriptedClient judge([](const std::string& prompt) -> std::string {
        if (prompt.find("great") != std::string::npos) return "Reasoned.\nScore: 5";
        if (prompt.find("weak") != std::string::npos) return "Thin.\nScore: 2";
        return "I cannot rate this.";
    });

    JudgeRun run = run_judge(cfg, &judge);
    CHECK(run.n_scored == 2);
    CHECK(run.n_failed == 1);
    CHECK(run.mean_score == doctest::Approx(3.5));

    json report = read_json_file(cfg.out_dir / "judge-report.json");
    CHECK(report.at("mean_score") == doctest::Approx(3.5));
    CHECK(report.at("n_scored") == 2);

    auto verdicts = read_jsonl(cfg.out_dir / "judge-verdicts.jsonl");
    REQUIRE(verdicts.size() == 3);
    CHECK(verdicts[0].at("id") == "a");
    CHECK(verdicts[0].at("score") == 5);
    CHECK(verdicts[0].at("error").is_null());
    CHECK(verdicts[2].at("score").is_null());
    CHECK_FALSE(verdicts[2].at("error").is_null());

    // sft.jsonl rows judge as-is: same field names.
    TempDir dir2("judge-sft");
    SftRecord rec;
    rec.id = "s1";
    rec.question = "Qs";
    rec.response = "great stuff";
    rec.strategy = Strategy::BinaryCut;
    write_file(dir2 / "corpus.jsonl", json(rec).dump() + "\n");
    RunConfig cfg2;
    cfg2.input = dir2 / "corpus.jsonl";
    cfg2.out_dir = dir2 / "out";
    JudgeRun run2 = run_judge(cfg2, &judge);
    CHECK(run2.n_scored == 1);
    CHECK(run2.mean_score == doctest::Approx(5.0));
}

TEST_CASE("prune aborts before any network call on config errors") {
    TempDir dir("abort");
    RunConfig cfg;
    cfg.input = dir / "missing.jsonl";
    cfg.out_dir = dir / "out";
    ScriptedClient client(corpus_handler());
    CHECK(throws_kind(ErrorKind::ConfigError, [&] { run_prune(cfg, &client); }));
    CHECK(client.calls() == 0);

    RunConfig bad;
    bad.input = dir / "missing.jsonl";
    bad.workers = 0;
    CHECK(throws_kind(ErrorKind::ConfigError, [&] { run_prune(bad, &client); }));
}
