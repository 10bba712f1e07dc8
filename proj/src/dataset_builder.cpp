#include "cotrim/dataset_builder.hpp"

#include "cotrim/serialization.hpp"

namespace cotrim {

namespace {

SkipEntry make_skip(const DistilledRow& row, std::string stage, std::string reason,
                    std::string detail) {
    return {row.record.id, std::move(stage), std::move(reason), std::move(detail),
            std::string(strategy_name(row.strategy))};
}

// Emittable rows must re-parse back to the recorded step count; anything
// else (e.g. a step that itself contains a think tag) would poison the
// training set silently.
bool reparses_cleanly(const DistilledRow& row, const SegmentationConfig& cfg,
                      std::string& detail) {
    try {
        ReasoningTrace parsed = parse_response(row.record.pruned_response, cfg);
        if (parsed.step_count() != row.record.kept_steps) {
            detail = "re-parsed to " + std::to_string(parsed.step_count()) + " steps, expected " +
                     std::to_string(row.record.kept_steps);
            return false;
        }
        return true;
    } catch (const Error& e) {
        detail = e.what();
        return false;
    }
}

}  // namespace

std::string build_pruned_response(const ReasoningTrace& trace,
                                  const std::vector<size_t>& kept_indices,
                                  const SegmentationConfig& cfg) {
    cfg.validate();
    size_t n = trace.step_count();
    if (kept_indices.empty())
        throw Error(ErrorKind::KeptLenOutOfRange, "at least one step must be kept");
    size_t prev = 0;
    for (size_t idx : kept_indices) {
        if (idx < 1 || idx > n)
            throw Error(ErrorKind::KeptLenOutOfRange,
                        "step index " + std::to_string(idx) + " outside [1, " +
                            std::to_string(n) + "]");
        if (idx <= prev)
            throw Error(ErrorKind::KeptLenOutOfRange, "step indices must strictly increase");
        prev = idx;
    }

    std::string out = cfg.think_open;
    out += '\n';
    for (size_t i = 0; i < kept_indices.size(); ++i) {
        if (i > 0) out += cfg.step_separator;
        out += trace.steps[kept_indices[i] - 1];
    }
    out += '\n';
    out += cfg.think_close;
    out += "\n\n";
    out += trace.summary;
    return out;
}

std::string build_pruned_response(const ReasoningTrace& trace, size_t kept_len,
                                  const SegmentationConfig& cfg) {
    if (kept_len < 1 || kept_len > trace.step_count())
        throw Error(ErrorKind::KeptLenOutOfRange,
                    "kept_len " + std::to_string(kept_len) + " outside [1, " +
                        std::to_string(trace.step_count()) + "]");
    std::vector<size_t> indices(kept_len);
    for (size_t i = 0; i < kept_len; ++i) indices[i] = i + 1;
    return build_pruned_response(trace, indices, cfg);
}

EmitResult emit_sft(const std::vector<DistilledRow>& rows, const std::filesystem::path& path,
                    const SegmentationConfig& cfg) {
    cfg.validate();
    EmitResult result;
    std::vector<SftRecord> out;
    out.reserve(rows.size());

    for (const auto& row : rows) {
        if (row.status != PruneStatus::Pruned && row.status != PruneStatus::KeptFull) {
            result.skips.push_back(make_skip(row, "sft",
                                             "status-" + std::string(prune_status_name(row.status)),
                                             row.error_detail.value_or("")));
            continue;
        }
        std::string detail;
        if (!reparses_cleanly(row, cfg, detail)) {
            result.skips.push_back(make_skip(row, "sft", "reparse-mismatch", detail));
            continue;
        }
        SftRecord rec;
        rec.id = row.record.id;
        rec.question = row.record.question;
        rec.response = row.record.pruned_response;
        rec.strategy = row.strategy;
        rec.kept_steps = row.record.kept_steps;
        rec.orig_steps = row.record.orig_steps;
        rec.oracle_calls_count = row.oracle_calls_count;
        out.push_back(std::move(rec));
    }

    result.written = write_jsonl(path, out);
    return result;
}

EmitResult emit_dpo(const std::vector<DistilledRow>& rows, const std::filesystem::path& path,
                    const TokenCounter& counter, const SegmentationConfig& cfg) {
    cfg.validate();
    EmitResult result;
    std::vector<DpoRecord> out;
    out.reserve(rows.size());

    for (const auto& row : rows) {
        if (row.status == PruneStatus::KeptFull) {
            result.skips.push_back(make_skip(row, "dpo", "no-length-contrast",
                                             "full trace kept, nothing to prefer"));
            continue;
        }
        if (row.status != PruneStatus::Pruned) {
            result.skips.push_back(make_skip(row, "dpo",
                                             "status-" + std::string(prune_status_name(row.status)),
                                             row.error_detail.value_or("")));
            continue;
        }
        const std::string& chosen = row.record.pruned_response;
        const std::string& rejected = row.record.full_response;
        if (chosen == rejected) {
            result.skips.push_back(make_skip(row, "dpo", "identical-pair", ""));
            continue;
        }
        size_t chosen_tokens = counter.count(chosen);
        size_t rejected_tokens = counter.count(rejected);
        if (chosen_tokens > rejected_tokens) {
            result.skips.push_back(make_skip(row, "dpo", "chosen-longer",
                                             std::to_string(chosen_tokens) + " > " +
                                                 std::to_string(rejected_tokens) + " tokens"));
            continue;
        }
        std::string detail;
        if (!reparses_cleanly(row, cfg, detail)) {
            result.skips.push_back(make_skip(row, "dpo", "reparse-mismatch", detail));
            continue;
        }
        DpoRecord rec;
        rec.id = row.record.id;
        rec.prompt = row.record.question;
        rec.chosen = chosen;
        rec.rejected = rejected;
        out.push_back(std::move(rec));
    }

    result.written = write_jsonl(path, out);
    return result;
}

}  // namespace cotrim
