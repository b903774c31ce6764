#include "sqzloop/export.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "sqzloop/errors.hpp"

namespace sqzloop {

using nlohmann::json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out.flush()) throw IoError(path.string(), "write failed");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());
}

Spectrum db_view(const Spectrum& s) { return to_db(s); }

json measured(const Measured& m) { return {{"value", m.value}, {"uncertainty", m.uncertainty}}; }

json entries(const std::vector<BudgetEntry>& es) {
  json arr = json::array();
  for (const auto& e : es) {
    arr.push_back({{"name", e.name}, {"value", e.value}, {"uncertainty", e.uncertainty}});
  }
  return arr;
}

json optional_measured(const std::optional<Measured>& m) { return m ? measured(*m) : json(nullptr); }

}  // namespace

std::string traces_to_csv(const TraceSet& traces) {
  std::vector<Spectrum> db;
  db.reserve(kTraceCount);
  for (const auto& t : traces.traces) db.push_back(db_view(t.spectrum));

  std::string out = "freq_hz";
  for (const auto& t : traces.traces) out += "," + t.name;
  out += '\n';
  for (std::size_t i = 0; i < traces.grid.size(); ++i) {
    out += fmt::format("{:.6g}", traces.grid[i]);
    for (const auto& s : db) out += fmt::format(",{:.6g}", s[i]);
    out += '\n';
  }
  return out;
}

json traces_to_json(const TraceSet& traces) {
  json j;
  j["schema_version"] = kTraceSchemaVersion;
  j["freq_hz"] = std::vector<double>(traces.grid.points().begin(), traces.grid.points().end());
  json& tj = j["traces"];
  for (const auto& t : traces.traces) {
    const auto db = db_view(t.spectrum);
    tj[t.name] = {
        {"role", t.role},
        {"unit", unit_name(t.spectrum.unit())},
        {"db_unit", unit_name(db.unit())},
        {"values", std::vector<double>(t.spectrum.values().begin(), t.spectrum.values().end())},
        {"values_db", std::vector<double>(db.values().begin(), db.values().end())},
    };
  }
  return j;
}

TraceSet traces_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kTraceSchemaVersion) {
      throw StructuralError("unsupported trace schema_version");
    }
    FrequencyGrid grid(j.at("freq_hz").get<std::vector<double>>());
    const json& tj = j.at("traces");
    auto load = [&](std::size_t k) {
      const std::string name = fmt::format("trace_{}", static_cast<char>('a' + k));
      const json& t = tj.at(name);
      return Trace{name, t.at("role").get<std::string>(),
                   Spectrum(grid, t.at("values").get<std::vector<double>>(),
                            unit_from_name(t.at("unit").get<std::string>()))};
    };
    return TraceSet{grid, {load(0), load(1), load(2), load(3), load(4), load(5), load(6), load(7)}};
  } catch (const json::exception& e) {
    throw StructuralError(fmt::format("malformed trace JSON: {}", e.what()));
  }
}

std::filesystem::path export_traces(const TraceSet& traces, const std::filesystem::path& dir,
                                    TraceFormat format) {
  ensure_dir(dir);
  if (format == TraceFormat::kCsv) {
    const auto path = dir / "traces.csv";
    write_file(path, traces_to_csv(traces));
    return path;
  }
  const auto path = dir / "traces.json";
  write_file(path, traces_to_json(traces).dump(2) + "\n");
  return path;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(fields, cell, ',')) {
      if (first) {
        table.header.push_back(cell);
      } else {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(cell, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != cell.size()) throw StructuralError(fmt::format("{}: bad CSV cell '{}'", path.string(), cell));
        row.push_back(v);
      }
    }
    if (!first) {
      if (row.size() != table.header.size()) {
        throw StructuralError(fmt::format("{}: row width {} != header width {}", path.string(),
                                          row.size(), table.header.size()));
      }
      table.rows.push_back(std::move(row));
    }
    first = false;
  }
  return table;
}

TraceSet read_traces_json(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw StructuralError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return traces_from_json(j);
}

double max_trace_sum_deviation_db(const CsvTable& table) {
  auto column = [&](std::string_view name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw StructuralError(fmt::format("CSV lacks column {}", name));
    return static_cast<std::size_t>(it - table.header.begin());
  };
  const std::size_t h = column("trace_h");
  const std::size_t parts[] = {column("trace_d"), column("trace_e"), column("trace_f"), column("trace_g")};
  double worst = 0.0;
  for (const auto& row : table.rows) {
    double sum = 0.0;
    for (std::size_t p : parts) sum += linear_from_db(row[p]);
    worst = std::max(worst, std::abs(db_from_linear(sum) - row[h]));
  }
  return worst;
}

json budget_to_json(const BudgetReport& r, const ScenarioAnchors* anchors) {
  json j;
  j["schema_version"] = kBudgetSchemaVersion;
  j["entries"] = {
      {"efficiencies", entries(r.table.efficiencies)},
      {"phase_fluctuations_mrad", entries(r.table.phase_fluctuations)},
      {"couplings_percent", entries(r.table.couplings)},
  };
  j["stated"] = {
      {"total_efficiency", optional_measured(r.table.stated_total_efficiency)},
      {"total_phase_mrad", optional_measured(r.table.stated_total_phase_mrad)},
      {"total_coupling_percent", optional_measured(r.table.stated_total_coupling_percent)},
      {"loss_degradation_db", r.table.stated_loss_db},
      {"phase_degradation_db", r.table.stated_phase_db},
      {"coupling_degradation_db", r.table.stated_coupling_db},
  };
  j["totals"] = {
      {"efficiency", measured(r.efficiency_product)},
      {"phase_mrad",
       {{"linear_sum", measured(r.phase_linear_mrad)},
        {"quadrature_sum", measured(r.phase_quadrature_mrad)},
        {"ledger_mode", r.phase_mode == PhaseSumMode::kLinearSum ? "linear_sum" : "quadrature_sum"},
        {"physically_preferred", "quadrature_sum"}}},
      {"coupling_fraction", measured(r.coupling_fraction)},
  };
  j["ledger"] = {
      {"initial_squeezing_db", r.ledger.initial_squeezing_db},
      {"loss_degradation_db", r.ledger.loss_degradation_db},
      {"phase_degradation_db", r.ledger.phase_degradation_db},
      {"coupling_fraction", r.ledger.coupling_fraction},
      {"servo_imperfection_db", r.ledger.servo_imperfection_db},
  };
  j["stages_db"] = {r.stages.after_loss_and_phase_db, r.stages.after_coupling_db, r.stages.final_db};
  j["floored_stages"] = r.stages.floored;
  j["physical_model"] = {
      {"loss_degradation_db", r.physical_loss_degradation_db},
      {"phase_degradation_db", r.physical_phase_degradation_db},
      {"detected_squeezing_db", r.physical_detected_squeezing_db},
  };
  json disc = json::array();
  for (const auto& d : r.discrepancies) {
    disc.push_back({{"name", d.name}, {"computed", d.computed}, {"stated", d.stated}, {"note", d.note}});
  }
  j["discrepancies"] = disc;
  if (anchors) {
    const auto& a = *anchors;
    j["anchors"] = {
        {"shot_noise_rsn2_per_hz", a.shot_noise_rsn2},
        {"shot_noise_db_per_hz", a.shot_noise_db},
        {"amplitude_floor_db_per_hz", a.amplitude_floor_db},
        {"amplitude_floor_below_shot_noise_db", a.amplitude_gap_db},
        {"electronic_floor_db_per_hz", a.electronic_floor_db},
        {"cross_cavity_normalization", a.cross_cavity_normalization},
        {"cross_cavity_normalization_db", a.cross_cavity_normalization_db},
        {"unity_gain_frequency_hz", a.unity_gain_frequency_hz},
        {"unity_gain_calibrated", a.unity_gain_calibrated},
        {"coupling_at_calibration_frequency",
         {{"frequency_hz", a.calibration_frequency_hz},
          {"inloop_residual", a.coupling_inloop_residual},
          {"residual_amplitude", a.coupling_amplitude},
          {"electronic", a.coupling_electronic}}},
    };
  }
  return j;
}

std::filesystem::path export_budget(const BudgetReport& report, const std::filesystem::path& dir,
                                    const ScenarioAnchors* anchors) {
  ensure_dir(dir);
  const auto path = dir / "budget.json";
  write_file(path, budget_to_json(report, anchors).dump(2) + "\n");
  return path;
}

}  // namespace sqzloop
