#include "cotrim/eval_harness.hpp"

#include <chrono>
#include <mutex>
#include <regex>
#include <unordered_map>

#include "cotrim/parallel.hpp"
#include "cotrim/serialization.hpp"
#include "text_util.hpp"

namespace cotrim {

namespace {

constexpr std::string_view kQuestionSlot = "{question}";
constexpr std::string_view kResponseSlot = "{response}";

size_t count_occurrences(std::string_view text, std::string_view needle) {
    size_t count = 0;
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string_view::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

}  // namespace

EvalReport evaluate(const std::vector<BenchItem>& items, ChatClient& client,
                    const TokenCounter& counter, const EvalOptions& opts,
                    const SegmentationConfig& seg) {
    if (items.empty()) throw Error(ErrorKind::ConfigError, "no benchmark items to evaluate");

    std::unordered_map<std::string, ItemVerdict> persisted;
    if (!opts.verdicts_path.empty() && std::filesystem::exists(opts.verdicts_path)) {
        for (auto& v : read_jsonl_as<ItemVerdict>(opts.verdicts_path))
            persisted[v.id] = std::move(v);
    }

    std::vector<ItemVerdict> verdicts(items.size());
    std::mutex append_mu;
    std::ofstream append;
    if (!opts.verdicts_path.empty()) {
        if (opts.verdicts_path.has_parent_path())
            std::filesystem::create_directories(opts.verdicts_path.parent_path());
        append.open(opts.verdicts_path, std::ios::binary | std::ios::app);
        if (!append)
            throw Error(ErrorKind::IoError, "cannot append to " + opts.verdicts_path.string());
    }

    parallel_for(items.size(), opts.workers, [&](size_t i) {
        const BenchItem& item = items[i];
        if (auto it = persisted.find(item.id); it != persisted.end()) {
            verdicts[i] = it->second;
            return;
        }

        ItemVerdict v;
        v.id = item.id;
        std::string prompt = opts.instruction_prefix.empty()
                                 ? item.question
                                 : opts.instruction_prefix + "\n\n" + item.question;
        try {
            auto t0 = std::chrono::steady_clock::now();
            v.completion = client.complete(prompt);
            v.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
            v.extracted = extract_final_answer(v.completion, opts.extraction);
            v.correct = v.extracted && answers_match(*v.extracted, item.gold_answer);
            ThinkTokenCount tc = count_think_tokens(v.completion, counter, seg);
            v.think_found = tc.think_found;
            v.think_tokens = tc.think_found ? tc.tokens : counter.count(v.completion);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EndpointError) throw;
            v.failed = true;
            v.error_detail = e.what();
        }
        verdicts[i] = v;

        if (append.is_open()) {
            std::lock_guard lock(append_mu);
            append << nlohmann::json(v).dump() << "\n";
            append.flush();
        }
    });

    return report_from_verdicts(verdicts, opts.exclude_failed);
}

EvalReport report_from_verdicts(const std::vector<ItemVerdict>& verdicts, bool exclude_failed) {
    EvalReport report;
    report.per_item = verdicts;
    report.n_items = verdicts.size();

    double token_sum = 0.0;
    size_t n_counted = 0;
    for (const auto& v : verdicts) {
        if (v.correct) ++report.n_correct;
        if (v.failed) {
            ++report.n_failed;
            continue;
        }
        token_sum += static_cast<double>(v.think_tokens);
        ++n_counted;
    }

    size_t denom = exclude_failed ? report.n_items - report.n_failed : report.n_items;
    report.accuracy = denom > 0
                          ? 100.0 * static_cast<double>(report.n_correct) /
                                static_cast<double>(denom)
                          : 0.0;
    report.avg_think_tokens = n_counted > 0 ? token_sum / static_cast<double>(n_counted) : 0.0;
    return report;
}

void JudgeTemplate::validate() const {
    if (count_occurrences(text, kQuestionSlot) != 1)
        throw Error(ErrorKind::TemplateInvalid, "judge template needs exactly one {question}");
    if (count_occurrences(text, kResponseSlot) != 1)
        throw Error(ErrorKind::TemplateInvalid, "judge template needs exactly one {response}");
}

std::string render_judge_prompt(const std::string& question, const std::string& response,
                                const JudgeTemplate& tpl) {
    tpl.validate();
    if (response.empty()) throw Error(ErrorKind::ConfigError, "nothing to judge: empty response");
    return detail::splice_two(tpl.text, kQuestionSlot, question, kResponseSlot, response);
}

int parse_judge_score(const std::string& judged_text) {
    static const std::regex score_re(R"(Score:\s*(-?[0-9]+))");
    std::optional<int> last;
    for (auto it = std::sregex_iterator(judged_text.begin(), judged_text.end(), score_re);
         it != std::sregex_iterator(); ++it) {
        last = std::stoi((*it)[1].str());
    }
    if (!last) throw Error(ErrorKind::ScoreMissing, "no 'Score: N' line in judge output");
    if (*last < 0 || *last > 5)
        throw Error(ErrorKind::ScoreOutOfRange,
                    "score " + std::to_string(*last) + " outside [0,5]");
    return *last;
}

int judge_score(const std::string& question, const std::string& response, ChatClient& judge,
                const JudgeTemplate& tpl) {
    return parse_judge_score(judge.complete(render_judge_prompt(question, response, tpl)));
}

}  // namespace cotrim
