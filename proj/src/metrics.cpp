#include "cotrim/metrics.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "text_util.hpp"

namespace cotrim {

using detail::is_space;
using detail::trim;

namespace {

size_t whitespace_count(std::string_view text) {
    size_t count = 0;
    bool in_token = false;
    for (char c : text) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

size_t external_count(const std::string& command, std::string_view text) {
    if (command.empty())
        throw Error(ErrorKind::ConfigError, "external token counter needs a command");

    namespace fs = std::filesystem;
    static std::atomic<uint64_t> serial{0};
    fs::path tmp = fs::temp_directory_path() /
                   ("cotrim-count-" + hex64(stable_hash64(std::to_string(serial++), stable_hash64(text))) +
                    ".txt");
    {
        std::ofstream out(tmp, std::ios::binary);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
    }

    std::string shell = command + " < " + tmp.string();
    FILE* pipe = popen(shell.c_str(), "r");
    if (!pipe) {
        fs::remove(tmp);
        throw Error(ErrorKind::IoError, "cannot run token counter: " + command);
    }
    std::string output;
    char buf[256];
    while (fgets(buf, sizeof(buf), pipe)) output += buf;
    int rc = pclose(pipe);
    fs::remove(tmp);
    if (rc != 0)
        throw Error(ErrorKind::IoError, "token counter exited with status " + std::to_string(rc));

    try {
        return static_cast<size_t>(std::stoull(trim(output)));
    } catch (const std::exception&) {
        throw Error(ErrorKind::IoError, "token counter produced no number: '" + trim(output) + "'");
    }
}

}  // namespace

std::string token_counter_mode_name(TokenCounterMode mode) {
    switch (mode) {
        case TokenCounterMode::Whitespace: return "whitespace";
        case TokenCounterMode::CharApprox: return "char-approx";
        case TokenCounterMode::External: return "external";
    }
    return "whitespace";
}

TokenCounterMode parse_token_counter_mode(std::string_view name) {
    if (name == "whitespace") return TokenCounterMode::Whitespace;
    if (name == "char-approx") return TokenCounterMode::CharApprox;
    if (name == "external") return TokenCounterMode::External;
    throw Error(ErrorKind::ConfigError, "unknown token counter mode: " + std::string(name));
}

size_t TokenCounter::count(std::string_view text) const {
    switch (mode) {
        case TokenCounterMode::Whitespace:
            return whitespace_count(text);
        case TokenCounterMode::CharApprox:
            return (text.size() + 3) / 4;
        case TokenCounterMode::External:
            return external_count(command, text);
    }
    return 0;
}

ThinkTokenCount count_think_tokens(std::string_view text, const TokenCounter& counter,
                                   const SegmentationConfig& cfg) {
    cfg.validate();
    size_t open = text.find(cfg.think_open);
    if (open == std::string_view::npos) return {0, false};
    size_t body = open + cfg.think_open.size();
    size_t close = text.find(cfg.think_close, body);
    if (close == std::string_view::npos) return {0, false};
    return {counter.count(text.substr(body, close - body)), true};
}

double corpus_ratio(double orig_mean, double remaining_mean) {
    if (!(orig_mean > 0.0))
        throw Error(ErrorKind::ZeroOriginal, "original mean must be positive");
    return remaining_mean / orig_mean * 100.0;
}

std::array<size_t, 10> bucket_distribution(const std::vector<double>& ratios_percent) {
    std::array<size_t, 10> bins{};
    for (double r : ratios_percent) {
        if (!(r >= 0.0 && r <= 100.0))
            throw Error(ErrorKind::RatioOutOfRange,
                        "ratio " + std::to_string(r) + " outside [0,100]");
        size_t bin = std::min(static_cast<size_t>(r / 10.0), size_t{9});
        ++bins[bin];
    }
    return bins;
}

StrategyStats compute_strategy_stats(Strategy strategy,
                                     const std::vector<DistilledRecord>& records,
                                     size_t n_rejected) {
    StrategyStats stats;
    stats.strategy = strategy;
    stats.n_records = records.size();
    stats.n_rejected = n_rejected;
    if (records.empty()) return stats;

    double orig_sum = 0.0;
    double kept_sum = 0.0;
    std::vector<double> ratios;
    ratios.reserve(records.size());
    size_t last10 = 0;
    for (const auto& rec : records) {
        orig_sum += static_cast<double>(rec.orig_tokens);
        kept_sum += static_cast<double>(rec.kept_tokens);
        ratios.push_back(rec.ratio * 100.0);
        if (rec.kept_steps + 10 > rec.orig_steps) ++last10;
    }
    stats.orig_mean = orig_sum / static_cast<double>(records.size());
    stats.remaining_mean = kept_sum / static_cast<double>(records.size());
    stats.ratio = stats.orig_mean > 0.0
                      ? round2(corpus_ratio(stats.orig_mean, stats.remaining_mean))
                      : 0.0;
    stats.bins = bucket_distribution(ratios);
    stats.last10_fraction = static_cast<double>(last10) / static_cast<double>(records.size());
    return stats;
}

double round2(double x) {
    return std::round(x * 100.0) / 100.0;
}

}  // namespace cotrim
