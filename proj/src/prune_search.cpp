#include "cotrim/prune_search.hpp"

namespace cotrim {

namespace {

struct CallLog {
    const PrefixOracle& oracle;
    std::vector<OracleCall>& calls;

    bool operator()(size_t k) const {
        bool valid = oracle(k);
        calls.push_back({k, valid});
        return valid;
    }
};

void mark_failed(PruneOutcome& out, const Error& e) {
    out.status = PruneStatus::Failed;
    out.kept_len.reset();
    out.error_detail = e.what();
}

PruneOutcome binary_cut_paper(size_t n, const PrefixOracle& oracle, const SearchConfig& cfg) {
    PruneOutcome out;
    out.strategy = Strategy::BinaryCut;
    CallLog call{oracle, out.oracle_calls};

    try {
        bool full_validated = false;
        if (cfg.precheck_full) {
            if (!call(n)) {
                out.status = PruneStatus::RejectedFullInvalid;
                return out;
            }
            full_validated = true;
        }

        size_t low = 1;
        size_t high = n;
        size_t best = n;
        size_t mid = 0;
        bool entered_backtracking = false;
        while (low < high) {
            mid = (low + high) / 2;
            if (call(mid)) {
                best = mid;
                high = mid;
            } else {
                entered_backtracking = true;
                break;
            }
        }

        if (entered_backtracking) {
            low = mid;
            high = n;
            while (low < high) {
                mid = (low + high + 1) / 2;
                if (call(mid)) {
                    out.status = PruneStatus::Pruned;
                    out.kept_len = mid;
                    return out;
                }
                low = mid + 1;
            }
        }

        if (best == n && !full_validated) {
            // Nothing below n validated; confirm before reporting the full trace.
            if (!call(n)) {
                out.status = PruneStatus::RejectedFullInvalid;
                return out;
            }
        }
        out.status = best < n ? PruneStatus::Pruned : PruneStatus::KeptFull;
        out.kept_len = best;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::EndpointError) throw;
        mark_failed(out, e);
    }
    return out;
}

PruneOutcome binary_cut_strict(size_t n, const PrefixOracle& oracle, const SearchConfig& cfg) {
    PruneOutcome out;
    out.strategy = Strategy::BinaryCut;
    CallLog call{oracle, out.oracle_calls};

    try {
        if (cfg.precheck_full && !call(n)) {
            out.status = PruneStatus::RejectedFullInvalid;
            return out;
        }

        size_t low = 1;
        size_t high = n;
        while (low < high) {
            size_t mid = (low + high) / 2;
            if (call(mid))
                high = mid;
            else
                low = mid + 1;
        }

        bool confirmed = false;
        for (auto it = out.oracle_calls.rbegin(); it != out.oracle_calls.rend(); ++it) {
            if (it->prefix_len == low) {
                confirmed = it->valid;
                break;
            }
        }
        if (!confirmed && !call(low)) {
            out.status = PruneStatus::RejectedFullInvalid;
            out.error_detail = low == n ? "full trace invalid"
                                        : "convergence point invalid (non-monotone oracle?)";
            return out;
        }
        out.status = low < n ? PruneStatus::Pruned : PruneStatus::KeptFull;
        out.kept_len = low;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::EndpointError) throw;
        mark_failed(out, e);
    }
    return out;
}

}  // namespace

std::string search_mode_name(SearchMode mode) {
    switch (mode) {
        case SearchMode::PaperFaithful: return "paper-faithful";
        case SearchMode::StrictBinary: return "strict-binary";
    }
    return "paper-faithful";
}

SearchMode parse_search_mode(std::string_view name) {
    if (name == "paper-faithful") return SearchMode::PaperFaithful;
    if (name == "strict-binary") return SearchMode::StrictBinary;
    throw Error(ErrorKind::ConfigError, "unknown search mode: " + std::string(name));
}

void SearchConfig::validate() const {
    if (!(random_keep_prob > 0.0 && random_keep_prob < 1.0))
        throw Error(ErrorKind::ConfigError, "random_keep_prob must lie in (0,1)");
}

PruneOutcome binary_cut(const ReasoningTrace& trace, const PrefixOracle& oracle,
                        const SearchConfig& cfg) {
    cfg.validate();
    size_t n = trace.step_count();
    if (n == 0) throw Error(ErrorKind::EmptySteps, "trace has no steps");
    return cfg.mode == SearchMode::StrictBinary ? binary_cut_strict(n, oracle, cfg)
                                                : binary_cut_paper(n, oracle, cfg);
}

PruneOutcome fcs_cut(const ReasoningTrace& trace, const PrefixOracle& oracle,
                     const SearchConfig& cfg) {
    cfg.validate();
    size_t n = trace.step_count();
    if (n == 0) throw Error(ErrorKind::EmptySteps, "trace has no steps");

    PruneOutcome out;
    out.strategy = Strategy::Fcs;
    CallLog call{oracle, out.oracle_calls};
    try {
        for (size_t k = 1; k <= n; ++k) {
            if (call(k)) {
                out.status = k < n ? PruneStatus::Pruned : PruneStatus::KeptFull;
                out.kept_len = k;
                return out;
            }
        }
        out.status = PruneStatus::RejectedFullInvalid;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::EndpointError) throw;
        mark_failed(out, e);
    }
    return out;
}

PruneOutcome random_cut(const ReasoningTrace& trace, uint64_t seed, double keep_prob,
                        bool validate_result, const StepsOracle& oracle) {
    if (!(keep_prob > 0.0 && keep_prob < 1.0))
        throw Error(ErrorKind::ConfigError, "keep_prob must lie in (0,1)");
    size_t n = trace.step_count();
    if (n == 0) throw Error(ErrorKind::EmptySteps, "trace has no steps");

    PruneOutcome out;
    out.strategy = Strategy::Random;

    std::mt19937_64 rng(seed);
    out.kept_indices.push_back(1);
    for (size_t i = 2; i < n; ++i)
        if (next_unit(rng) < keep_prob) out.kept_indices.push_back(i);
    if (n > 1) out.kept_indices.push_back(n);

    out.kept_len = out.kept_indices.size();
    out.status = out.kept_indices.size() == n ? PruneStatus::KeptFull : PruneStatus::Pruned;

    if (validate_result) {
        if (!oracle) throw Error(ErrorKind::ConfigError, "random validation needs an oracle");
        std::vector<std::string> kept;
        kept.reserve(out.kept_indices.size());
        for (size_t idx : out.kept_indices) kept.push_back(trace.steps[idx - 1]);
        try {
            bool valid = oracle(kept);
            out.oracle_calls.push_back({kept.size(), valid});
            if (!valid) {
                out.status = PruneStatus::RejectedFullInvalid;
                out.kept_len.reset();
                out.error_detail = "random subsequence failed validation";
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EndpointError) throw;
            mark_failed(out, e);
        }
    }
    return out;
}

double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cotrim
