#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cotrim/pipeline.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::string> input;
    std::optional<std::string> out_dir;
    std::optional<std::string> strategy;
    std::optional<std::string> mode;
    std::optional<int> max_in_flight;
    std::optional<uint64_t> seed;
    bool dry_run = false;
};

void add_common_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--config", o.config_path, "Run configuration JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd.add_option("--input", o.input, "Override the configured input file");
    cmd.add_option("--out-dir", o.out_dir, "Override the configured output directory");
    cmd.add_option("--max-in-flight", o.max_in_flight,
                   "Override the per-endpoint concurrent request cap")
        ->check(CLI::PositiveNumber);
}

cotrim::RunConfig load_with_overrides(const Overrides& o) {
    cotrim::RunConfig cfg = cotrim::RunConfig::load(o.config_path);
    if (o.input) cfg.input = *o.input;
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.strategy) cfg.search.strategy = cotrim::parse_strategy(*o.strategy);
    if (o.mode) cfg.search.mode = cotrim::parse_search_mode(*o.mode);
    if (o.max_in_flight) {
        cfg.oracle_endpoint.max_in_flight = *o.max_in_flight;
        cfg.eval_endpoint.max_in_flight = *o.max_in_flight;
        cfg.judge_endpoint.max_in_flight = *o.max_in_flight;
    }
    if (o.seed) cfg.seed = *o.seed;
    cfg.validate_common();
    return cfg;
}

int cmd_prune(const Overrides& o) {
    cotrim::RunConfig cfg = load_with_overrides(o);
    if (o.dry_run) {
        cotrim::DryRun dry = cotrim::run_dry(cfg);
        std::cout << "records: " << dry.n_records << "\n";
        if (!dry.sample_id.empty()) {
            std::cout << "sample prompt (" << dry.sample_id << "):\n"
                      << dry.sample_prompt << "\n";
        } else {
            std::cout << "no parseable record to render a sample prompt from\n";
        }
        return 0;
    }
    cotrim::PruneRun run = cotrim::run_prune(cfg);
    std::cout << "distilled " << run.n_distilled << " of " << run.n_input << " records ("
              << run.n_skipped << " skipped) -> " << run.distilled_path.string() << "\n";
    if (run.endpoint_requests)
        std::cout << "endpoint requests: " << *run.endpoint_requests << "\n";
    std::cout << "manifest: " << run.manifest_path.string() << "\n";
    return 0;
}

int cmd_emit(const Overrides& o, const std::string& kind) {
    cotrim::RunConfig cfg = load_with_overrides(o);
    cotrim::EmitResult result = cotrim::run_emit(cfg, kind);
    std::cout << "wrote " << result.written << " " << kind << " records -> "
              << (cfg.out_dir / (kind + ".jsonl")).string() << " (" << result.skips.size()
              << " skipped)\n";
    return 0;
}

int cmd_stats(const Overrides& o) {
    cotrim::RunConfig cfg = load_with_overrides(o);
    auto stats = cotrim::run_stats(cfg);
    for (const auto& [name, s] : stats) {
        std::cout << name << ": ratio " << s.ratio << "% over " << s.n_records << " records ("
                  << s.n_rejected << " rejected)\n";
    }
    std::cout << "report: " << (cfg.out_dir / "stats-report.json").string() << "\n";
    return 0;
}

int cmd_eval(const Overrides& o) {
    cotrim::RunConfig cfg = load_with_overrides(o);
    cotrim::EvalReport report = cotrim::run_eval(cfg);
    std::cout << "accuracy " << report.accuracy << " over " << report.n_items << " items ("
              << report.n_correct << " correct, " << report.n_failed << " failed), avg think tokens "
              << report.avg_think_tokens << "\n";
    std::cout << "report: " << (cfg.out_dir / "eval-report.json").string() << "\n";
    return 0;
}

int cmd_judge(const Overrides& o) {
    cotrim::RunConfig cfg = load_with_overrides(o);
    cotrim::JudgeRun run = cotrim::run_judge(cfg);
    std::cout << "mean score " << run.mean_score << " over " << run.n_scored << " scored items ("
              << run.n_failed << " failed)\n";
    std::cout << "report: " << (cfg.out_dir / "judge-report.json").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cotrim: prune long chain-of-thought traces into compact training data"};
    app.require_subcommand(1);

    Overrides prune_opts;
    CLI::App* prune = app.add_subcommand("prune", "Search each trace for a short valid prefix");
    add_common_options(*prune, prune_opts);
    prune->add_option("--strategy", prune_opts.strategy, "Pruning strategy")
        ->check(CLI::IsMember({"binary", "fcs", "random"}));
    prune->add_option("--mode", prune_opts.mode, "Binary search variant")
        ->check(CLI::IsMember({"paper-faithful", "strict-binary"}));
    prune->add_option("--seed", prune_opts.seed, "Seed for the random strategy");
    prune->add_flag("--dry-run", prune_opts.dry_run,
                    "Count records and render one sample prompt, no network");

    Overrides emit_opts;
    std::string emit_kind;
    CLI::App* emit = app.add_subcommand("emit", "Build sft.jsonl or dpo.jsonl from distilled rows");
    add_common_options(*emit, emit_opts);
    emit->add_option("--kind", emit_kind, "Dataset kind")
        ->required()
        ->check(CLI::IsMember({"sft", "dpo"}));

    Overrides stats_opts;
    CLI::App* stats = app.add_subcommand("stats", "Token-reduction statistics per strategy");
    add_common_options(*stats, stats_opts);

    Overrides eval_opts;
    CLI::App* eval = app.add_subcommand("eval", "Benchmark accuracy and thinking-length run");
    add_common_options(*eval, eval_opts);

    Overrides judge_opts;
    CLI::App* judge = app.add_subcommand("judge", "Score responses with the judge rubric");
    add_common_options(*judge, judge_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (prune->parsed()) return cmd_prune(prune_opts);
        if (emit->parsed()) return cmd_emit(emit_opts, emit_kind);
        if (stats->parsed()) return cmd_stats(stats_opts);
        if (eval->parsed()) return cmd_eval(eval_opts);
        if (judge->parsed()) return cmd_judge(judge_opts);
    } catch (const cotrim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
