#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cotrim/dataset_builder.hpp"
#include "cotrim/eval_harness.hpp"
#include "cotrim/metrics.hpp"
#include "cotrim/oracle_client.hpp"
#include "cotrim/types.hpp"

namespace cotrim {

// All external record forms round-trip: parse(serialize(x)) == x. Keys are
// emitted in nlohmann's sorted order, which keeps identical runs
// byte-identical.

NLOHMANN_JSON_SERIALIZE_ENUM(Strategy, {
    {Strategy::BinaryCut, "binary"},
    {Strategy::Fcs, "fcs"},
    {Strategy::Random, "random"},
})

NLOHMANN_JSON_SERIALIZE_ENUM(PruneStatus, {
    {PruneStatus::Pruned, "pruned"},
    {PruneStatus::KeptFull, "kept_full"},
    {PruneStatus::RejectedFullInvalid, "rejected_full_invalid"},
    {PruneStatus::Failed, "failed"},
})

namespace detail {

template <typename T>
void opt_to(nlohmann::json& j, const char* key, const std::optional<T>& value) {
    j[key] = value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

template <typename T>
void opt_from(const nlohmann::json& j, const char* key, std::optional<T>& value) {
    if (j.contains(key) && !j.at(key).is_null())
        value = j.at(key).template get<T>();
    else
        value.reset();
}

}  // namespace detail

void to_json(nlohmann::json& j, const SourceRecord& r);
void from_json(const nlohmann::json& j, SourceRecord& r);

void to_json(nlohmann::json& j, const ReasoningTrace& t);
void from_json(const nlohmann::json& j, ReasoningTrace& t);

void to_json(nlohmann::json& j, const OracleCall& c);
void from_json(const nlohmann::json& j, OracleCall& c);

void to_json(nlohmann::json& j, const PruneOutcome& o);
void from_json(const nlohmann::json& j, PruneOutcome& o);

void to_json(nlohmann::json& j, const DistilledRecord& r);
void from_json(const nlohmann::json& j, DistilledRecord& r);

void to_json(nlohmann::json& j, const DistilledRow& r);
void from_json(const nlohmann::json& j, DistilledRow& r);

void to_json(nlohmann::json& j, const SftRecord& r);
void from_json(const nlohmann::json& j, SftRecord& r);

void to_json(nlohmann::json& j, const DpoRecord& r);
void from_json(const nlohmann::json& j, DpoRecord& r);

void to_json(nlohmann::json& j, const SkipEntry& s);
void from_json(const nlohmann::json& j, SkipEntry& s);

void to_json(nlohmann::json& j, const ValidationVerdict& v);
void from_json(const nlohmann::json& j, ValidationVerdict& v);

void to_json(nlohmann::json& j, const StrategyStats& s);
void from_json(const nlohmann::json& j, StrategyStats& s);

void to_json(nlohmann::json& j, const BenchItem& b);
void from_json(const nlohmann::json& j, BenchItem& b);

void to_json(nlohmann::json& j, const ItemVerdict& v);
void from_json(const nlohmann::json& j, ItemVerdict& v);

void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);

// Raw JSONL access. read_jsonl throws Error(IoError) on unreadable files
// or unparseable lines (line number in the message); blank lines are
// skipped.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& value);

template <typename T>
std::vector<T> read_jsonl_as(const std::filesystem::path& path) {
    std::vector<T> out;
    for (const auto& j : read_jsonl(path)) out.push_back(j.template get<T>());
    return out;
}

template <typename T>
size_t write_jsonl(const std::filesystem::path& path, const std::vector<T>& values) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    for (const auto& v : values) out << nlohmann::json(v).dump() << "\n";
    if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
    return values.size();
}

}  // namespace cotrim
