#include "cotrim/types.hpp"

namespace cotrim {

std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MissingOpenTag: return "MissingOpenTag";
    case ErrorKind::MissingCloseTag: return "MissingCloseTag";
    case ErrorKind::EmptyThinkBlock: return "EmptyThinkBlock";
    case ErrorKind::EmptySteps: return "EmptySteps";
    case ErrorKind::TemplateInvalid: return "TemplateInvalid";
    case ErrorKind::EndpointError: return "EndpointError";
    case ErrorKind::KeptLenOutOfRange: return "KeptLenOutOfRange";
    case ErrorKind::ZeroOriginal: return "ZeroOriginal";
    case ErrorKind::RatioOutOfRange: return "RatioOutOfRange";
    case ErrorKind::ScoreMissing: return "ScoreMissing";
    case ErrorKind::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

std::string_view strategy_name(Strategy s) {
    switch (s) {
    case Strategy::BinaryCut: return "binary";
    case Strategy::Fcs: return "fcs";
    case Strategy::Random: return "random";
    }
    return "binary";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "binary") return Strategy::BinaryCut;
    if (name == "fcs") return Strategy::Fcs;
    if (name == "random") return Strategy::Random;
    throw Error(ErrorKind::ConfigError, "unknown strategy '" + std::string(name) + "'");
}

std::string_view prune_status_name(PruneStatus s) {
    switch (s) {
    case PruneStatus::Pruned: return "pruned";
    case PruneStatus::KeptFull: return "kept_full";
    case PruneStatus::RejectedFullInvalid: return "rejected_full_invalid";
    case PruneStatus::Failed: return "failed";
    }
    return "failed";
}

PruneStatus parse_prune_status(std::string_view name) {
    if (name == "pruned") return PruneStatus::Pruned;
    if (name == "kept_full") return PruneStatus::KeptFull;
    if (name == "rejected_full_invalid") return PruneStatus::RejectedFullInvalid;
    if (name == "failed") return PruneStatus::Failed;
    throw Error(ErrorKind::ConfigError, "unknown prune status '" + std::string(name) + "'");
}

std::uint64_t stable_hash64(std::string_view data, std::uint64_t seed) {
    constexpr std::uint64_t prime = 1099511628211ULL;
    std::uint64_t hash = seed;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= prime;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string derive_record_id(std::string_view question, std::string_view raw_response) {
    std::uint64_t h = stable_hash64(question);
    h = stable_hash64("\x1f", h);  // field separator
    h = stable_hash64(raw_response, h);
    return "r" + hex64(h);
}

}  // namespace cotrim
