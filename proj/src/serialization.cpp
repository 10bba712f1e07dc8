#include "cotrim/serialization.hpp"

namespace cotrim {

using detail::opt_from;
using detail::opt_to;
using nlohmann::json;

void to_json(json& j, const SourceRecord& r) {
    j = json{{"id", r.id},
             {"question", r.question},
             {"gold_answer", r.gold_answer},
             {"raw_response", r.raw_response},
             {"meta", r.meta}};
}

void from_json(const json& j, SourceRecord& r) {
    j.at("id").get_to(r.id);
    j.at("question").get_to(r.question);
    j.at("gold_answer").get_to(r.gold_answer);
    j.at("raw_response").get_to(r.raw_response);
    r.meta = j.value("meta", std::map<std::string, std::string>{});
}

void to_json(json& j, const ReasoningTrace& t) {
    j = json{{"steps", t.steps}, {"summary", t.summary}};
}

void from_json(const json& j, ReasoningTrace& t) {
    j.at("steps").get_to(t.steps);
    j.at("summary").get_to(t.summary);
}

void to_json(json& j, const OracleCall& c) {
    j = json{{"prefix_len", c.prefix_len}, {"valid", c.valid}};
}

void from_json(const json& j, OracleCall& c) {
    j.at("prefix_len").get_to(c.prefix_len);
    j.at("valid").get_to(c.valid);
}

void to_json(json& j, const PruneOutcome& o) {
    j = json{{"strategy", o.strategy},
             {"status", o.status},
             {"kept_indices", o.kept_indices},
             {"oracle_calls", o.oracle_calls}};
    opt_to(j, "kept_len", o.kept_len);
    opt_to(j, "error_detail", o.error_detail);
}

void from_json(const json& j, PruneOutcome& o) {
    j.at("strategy").get_to(o.strategy);
    j.at("status").get_to(o.status);
    o.kept_indices = j.value("kept_indices", std::vector<size_t>{});
    o.oracle_calls = j.value("oracle_calls", std::vector<OracleCall>{});
    opt_from(j, "kept_len", o.kept_len);
    opt_from(j, "error_detail", o.error_detail);
}

void to_json(json& j, const DistilledRecord& r) {
    j = json{{"id", r.id},
             {"question", r.question},
             {"full_response", r.full_response},
             {"pruned_response", r.pruned_response},
             {"orig_steps", r.orig_steps},
             {"kept_steps", r.kept_steps},
             {"orig_tokens", r.orig_tokens},
             {"kept_tokens", r.kept_tokens},
             {"ratio", r.ratio}};
}

void from_json(const json& j, DistilledRecord& r) {
    j.at("id").get_to(r.id);
    j.at("question").get_to(r.question);
    j.at("full_response").get_to(r.full_response);
    j.at("pruned_response").get_to(r.pruned_response);
    j.at("orig_steps").get_to(r.orig_steps);
    j.at("kept_steps").get_to(r.kept_steps);
    j.at("orig_tokens").get_to(r.orig_tokens);
    j.at("kept_tokens").get_to(r.kept_tokens);
    j.at("ratio").get_to(r.ratio);
}

void to_json(json& j, const DistilledRow& r) {
    j = json{{"record", r.record},
             {"strategy", r.strategy},
             {"status", r.status},
             {"oracle_calls_count", r.oracle_calls_count},
             {"kept_indices", r.kept_indices}};
    opt_to(j, "error_detail", r.error_detail);
}

void from_json(const json& j, DistilledRow& r) {
    j.at("record").get_to(r.record);
    j.at("strategy").get_to(r.strategy);
    j.at("status").get_to(r.status);
    j.at("oracle_calls_count").get_to(r.oracle_calls_count);
    r.kept_indices = j.value("kept_indices", std::vector<size_t>{});
    opt_from(j, "error_detail", r.error_detail);
}

void to_json(json& j, const SftRecord& r) {
    j = json{{"id", r.id},
             {"question", r.question},
             {"response", r.response},
             {"provenance",
              json{{"strategy", r.strategy},
                   {"kept_steps", r.kept_steps},
                   {"orig_steps", r.orig_steps},
                   {"oracle_calls_count", r.oracle_calls_count}}}};
}

void from_json(const json& j, SftRecord& r) {
    j.at("id").get_to(r.id);
    j.at("question").get_to(r.question);
    j.at("response").get_to(r.response);
    const json& p = j.at("provenance");
    p.at("strategy").get_to(r.strategy);
    p.at("kept_steps").get_to(r.kept_steps);
    p.at("orig_steps").get_to(r.orig_steps);
    p.at("oracle_calls_count").get_to(r.oracle_calls_count);
}

void to_json(json& j, const DpoRecord& r) {
    j = json{{"id", r.id},
             {"prompt", r.prompt},
             {"chosen", r.chosen},
             {"rejected", r.rejected},
             {"meta",
              json{{"recommended_sft_loss_weight", r.recommended_sft_loss_weight},
                   {"beta", r.beta}}}};
}

void from_json(const json& j, DpoRecord& r) {
    j.at("id").get_to(r.id);
    j.at("prompt").get_to(r.prompt);
    j.at("chosen").get_to(r.chosen);
    j.at("rejected").get_to(r.rejected);
    const json& m = j.at("meta");
    m.at("recommended_sft_loss_weight").get_to(r.recommended_sft_loss_weight);
    m.at("beta").get_to(r.beta);
}

void to_json(json& j, const SkipEntry& s) {
    j = json{{"id", s.id},
             {"stage", s.stage},
             {"reason", s.reason},
             {"detail", s.detail},
             {"strategy", s.strategy}};
}

void from_json(const json& j, SkipEntry& s) {
    j.at("id").get_to(s.id);
    j.at("stage").get_to(s.stage);
    j.at("reason").get_to(s.reason);
    s.detail = j.value("detail", "");
    s.strategy = j.value("strategy", "");
}

void to_json(json& j, const ValidationVerdict& v) {
    j = json{{"prefix_len", v.prefix_len},
             {"rendered_prompt", v.rendered_prompt},
             {"raw_completion", v.raw_completion},
             {"extractor", v.extractor},
             {"valid", v.valid},
             {"from_cache", v.from_cache},
             {"latency_ms", v.latency_ms}};
    opt_to(j, "extracted", v.extracted);
}

void from_json(const json& j, ValidationVerdict& v) {
    j.at("prefix_len").get_to(v.prefix_len);
    j.at("rendered_prompt").get_to(v.rendered_prompt);
    j.at("raw_completion").get_to(v.raw_completion);
    v.extractor = j.value("extractor", "none");
    j.at("valid").get_to(v.valid);
    j.at("from_cache").get_to(v.from_cache);
    j.at("latency_ms").get_to(v.latency_ms);
    opt_from(j, "extracted", v.extracted);
}

void to_json(json& j, const StrategyStats& s) {
    j = json{{"strategy", s.strategy},
             {"orig_mean", s.orig_mean},
             {"remaining_mean", s.remaining_mean},
             {"ratio", s.ratio},
             {"bins", s.bins},
             {"n_records", s.n_records},
             {"n_rejected", s.n_rejected},
             {"last10_fraction", s.last10_fraction}};
}

void from_json(const json& j, StrategyStats& s) {
    j.at("strategy").get_to(s.strategy);
    j.at("orig_mean").get_to(s.orig_mean);
    j.at("remaining_mean").get_to(s.remaining_mean);
    j.at("ratio").get_to(s.ratio);
    j.at("bins").get_to(s.bins);
    j.at("n_records").get_to(s.n_records);
    j.at("n_rejected").get_to(s.n_rejected);
    s.last10_fraction = j.value("last10_fraction", 0.0);
}

void to_json(json& j, const BenchItem& b) {
    j = json{{"id", b.id}, {"question", b.question}, {"gold_answer", b.gold_answer}};
}

void from_json(const json& j, BenchItem& b) {
    j.at("id").get_to(b.id);
    j.at("question").get_to(b.question);
    j.at("gold_answer").get_to(b.gold_answer);
}

void to_json(json& j, const ItemVerdict& v) {
    j = json{{"id", v.id},
             {"completion", v.completion},
             {"correct", v.correct},
             {"failed", v.failed},
             {"think_tokens", v.think_tokens},
             {"think_found", v.think_found},
             {"latency_ms", v.latency_ms}};
    opt_to(j, "extracted", v.extracted);
    opt_to(j, "error_detail", v.error_detail);
}

void from_json(const json& j, ItemVerdict& v) {
    j.at("id").get_to(v.id);
    j.at("completion").get_to(v.completion);
    j.at("correct").get_to(v.correct);
    j.at("failed").get_to(v.failed);
    j.at("think_tokens").get_to(v.think_tokens);
    j.at("think_found").get_to(v.think_found);
    j.at("latency_ms").get_to(v.latency_ms);
    opt_from(j, "extracted", v.extracted);
    opt_from(j, "error_detail", v.error_detail);
}

void to_json(json& j, const EvalReport& r) {
    j = json{{"accuracy", r.accuracy},
             {"avg_think_tokens", r.avg_think_tokens},
             {"n_items", r.n_items},
             {"n_correct", r.n_correct},
             {"n_failed", r.n_failed},
             {"per_item", r.per_item}};
}

void from_json(const json& j, EvalReport& r) {
    j.at("accuracy").get_to(r.accuracy);
    j.at("avg_think_tokens").get_to(r.avg_think_tokens);
    j.at("n_items").get_to(r.n_items);
    j.at("n_failed").get_to(r.n_failed);
    j.at("n_correct").get_to(r.n_correct);
    r.per_item = j.value("per_item", std::vector<ItemVerdict>{});
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::vector<json> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw Error(ErrorKind::IoError,
                        path.string() + ":" + std::to_string(line_no) + ": unparseable JSON line");
        out.push_back(std::move(j));
    }
    return out;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorKind::IoError, "unparseable JSON in " + path.string());
    return j;
}

void write_json_file(const std::filesystem::path& path, const json& value) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << value.dump(2) << "\n";
    if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace cotrim
