#pragma once

// File output for trace sets and budget reports.
//
// CSV: header `freq_hz,trace_a,...,trace_h`, one row per grid point, every
// value in dB (trace_a dB re 1 Hz^2/Hz, the rest dB/Hz), 6 significant
// digits, LF line endings.
// JSON: schema_version, freq_hz, and per trace its role, linear unit,
// linear values and dB values.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqzloop/scenario.hpp"

namespace sqzloop {

inline constexpr int kTraceSchemaVersion = 1;
inline constexpr int kBudgetSchemaVersion = 1;

enum class TraceFormat { kCsv, kJson };

std::string traces_to_csv(const TraceSet& traces);
nlohmann::json traces_to_json(const TraceSet& traces);
TraceSet traces_from_json(const nlohmann::json& j);

// Writes traces.csv or traces.json into `dir`; returns the file path.
std::filesystem::path export_traces(const TraceSet& traces, const std::filesystem::path& dir,
                                    TraceFormat format);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);
TraceSet read_traces_json(const std::filesystem::path& path);

// Re-parses an exported CSV and checks trace_h against the linear sum of
// traces d..g. Returns the largest deviation in dB.
double max_trace_sum_deviation_db(const CsvTable& table);

nlohmann::json budget_to_json(const BudgetReport& report, const ScenarioAnchors* anchors = nullptr);
std::filesystem::path export_budget(const BudgetReport& report, const std::filesystem::path& dir,
                                    const ScenarioAnchors* anchors = nullptr);

}  // namespace sqzloop
