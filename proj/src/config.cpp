#include "sqzloop/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <yaml-cpp/yaml.h>

#include "sqzloop/errors.hpp"

namespace sqzloop {

void validate_floor(const FloorSpec& spec) {
  if (const auto* flat = std::get_if<FlatFloor>(&spec)) {
    if (!std::isfinite(flat->level_db)) throw ValidationError("flat floor level is not finite");
    return;
  }
  const auto& segs = std::get<PowerLawFloor>(spec).segments;
  if (segs.empty()) throw ValidationError("power-law floor has no segments");
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const auto& s = segs[k];
    if (!(std::isfinite(s.f_corner_hz) && s.f_corner_hz > 0.0) || !std::isfinite(s.exponent) ||
        !std::isfinite(s.level_db)) {
      throw ValidationError(fmt::format("power-law segment {} has invalid fields", k));
    }
    if (k == 0) continue;
    const auto& prev = segs[k - 1];
    if (!(s.f_corner_hz > prev.f_corner_hz)) {
      throw ValidationError(fmt::format("power-law corners not increasing at segment {}", k));
    }
    const double extrapolated =
        prev.level_db + 10.0 * prev.exponent * std::log10(s.f_corner_hz / prev.f_corner_hz);
    if (std::abs(extrapolated - s.level_db) > kFloorJunctionToleranceDb) {
      throw ValidationError(fmt::format(
          "power-law junction at {} Hz is discontinuous: previous segment reaches {:.4f} dB, "
          "segment {} starts at {:.4f} dB",
          s.f_corner_hz, extrapolated, k, s.level_db));
    }
  }
}

double floor_level_db(const FloorSpec& spec, double f_hz) {
  if (const auto* flat = std::get_if<FlatFloor>(&spec)) return flat->level_db;
  const auto& segs = std::get<PowerLawFloor>(spec).segments;
  std::size_t k = 0;
  while (k + 1 < segs.size() && f_hz >= segs[k + 1].f_corner_hz) ++k;
  return segs[k].level_db + 10.0 * segs[k].exponent * std::log10(f_hz / segs[k].f_corner_hz);
}

GridSpec parse_grid_spec(const std::string& text) {
  GridSpec g;
  char c1 = 0;
  char c2 = 0;
  long long n = 0;
  std::istringstream in(text);
  if (!(in >> g.f_min_hz >> c1 >> g.f_max_hz >> c2 >> n) || c1 != ':' || c2 != ':' ||
      !(in >> std::ws).eof()) {
    throw ValidationError(fmt::format("grid '{}' is not FMIN:FMAX:N", text));
  }
  if (!(g.f_min_hz > 0.0 && g.f_max_hz > g.f_min_hz) || n < 2) {
    throw ValidationError(fmt::format("grid '{}' needs 0 < FMIN < FMAX and N >= 2", text));
  }
  g.points = static_cast<std::size_t>(n);
  return g;
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kUser: return "user";
    case Provenance::kPaperDefault: return "paper-default";
    case Provenance::kCalibrated: return "calibrated";
  }
  return "unknown";
}

SqueezerParams ScenarioConfig::squeezer() const {
  std::vector<NamedValue> eff;
  for (const auto& e : budget.efficiencies) eff.push_back({e.name, e.value});
  std::vector<NamedValue> jit;
  if (phase_mode == PhaseSumMode::kLinearSum) {
    for (const auto& p : budget.phase_fluctuations) jit.push_back({p.name, p.value});
  } else {
    jit.push_back({"quadrature total",
                   total_phase_fluctuation(budget.phase_fluctuations, phase_mode).value});
  }
  return SqueezerParams(squeezing_db, antisqueezing_db, std::move(eff), std::move(jit));
}

EnhancementLedger ScenarioConfig::ledger() const {
  EnhancementLedger l = ledger_from_table(budget, squeezing_db, servo_imperfection_db);
  l.loss_degradation_db = loss_degradation_db;
  l.phase_degradation_db = phase_degradation_db;
  if (coupling_fraction) l.coupling_fraction = *coupling_fraction;
  return l;
}

namespace {

std::string fmt_num(double v) { return fmt::format("{:.6g}", v); }

std::string floor_to_string(const FloorSpec& spec) {
  if (const auto* flat = std::get_if<FlatFloor>(&spec)) {
    return fmt::format("flat {} dB", fmt_num(flat->level_db));
  }
  std::string out = "power_law";
  for (const auto& s : std::get<PowerLawFloor>(spec).segments) {
    out += fmt::format(" [{} Hz, f^{}, {} dB]", fmt_num(s.f_corner_hz), fmt_num(s.exponent),
                       fmt_num(s.level_db));
  }
  return out;
}

std::string entries_to_string(const std::vector<BudgetEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    if (!out.empty()) out += "; ";
    out += fmt::format("{}={}±{}", e.name, fmt_num(e.value), fmt_num(e.uncertainty));
  }
  return out.empty() ? "(none)" : out;
}

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) {
  throw ValidationError(line_of(n) > 0 ? fmt::format("line {}: {}", line_of(n), what) : what);
}

// Reads one YAML mapping section, records provenance for every key it
// resolves, and rejects keys it does not know.
class Section {
 public:
  Section(const YAML::Node& root, std::string name, std::vector<EchoLine>& echo)
      : name_(std::move(name)), echo_(echo) {
    if (root && root[name_]) {
      node_ = root[name_];
      if (!node_.IsMap() && !node_.IsNull()) fail(node_, fmt::format("'{}' must be a mapping", name_));
    }
  }

  ~Section() noexcept(false) {
    if (!node_ || !node_.IsMap() || std::uncaught_exceptions() > 0) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.contains(key)) fail(kv.first, fmt::format("unknown key '{}.{}'", name_, key));
    }
  }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node& view = node_;
    return view[key];
  }

  double number(const std::string& key, double fallback, const std::string& source) {
    auto n = raw(key);
    if (!n) {
      record(key, fmt_num(fallback), Provenance::kPaperDefault, source);
      return fallback;
    }
    const double v = as_double(n, key);
    record(key, fmt_num(v), Provenance::kUser, "");
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback, const std::string& source) {
    auto n = raw(key);
    if (!n) {
      record(key, fallback, Provenance::kPaperDefault, source);
      return fallback;
    }
    if (!n.IsScalar()) fail(n, fmt::format("'{}.{}' must be a scalar", name_, key));
    const auto v = n.as<std::string>();
    record(key, v, Provenance::kUser, "");
    return v;
  }

  double as_double(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, fmt::format("'{}.{}' must be a number", name_, key));
    double v = 0.0;
    if (!YAML::convert<double>::decode(n, v) || !std::isfinite(v)) {
      fail(n, fmt::format("'{}.{}' = '{}' is not a finite number", name_, key, n.Scalar()));
    }
    return v;
  }

  void record(const std::string& key, std::string value, Provenance p, std::string source) {
    echo_.push_back({name_ + "." + key, std::move(value), p, std::move(source)});
  }

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  YAML::Node node_;
  std::set<std::string> seen_;
  std::vector<EchoLine>& echo_;
};

template <typename F>
auto validated(const YAML::Node& where, const std::string& field, F&& build) {
  try {
    return build();
  } catch (const DomainError& e) {
    fail(where, fmt::format("{}: {}", field, e.what()));
  }
}

CavityParams read_cavity(Section& s, double fwhm_default, const char* regime_default,
                         double loss_default, const std::string& source) {
  const double fwhm = s.number("fwhm_hz", fwhm_default, source);
  const auto regime_text = s.text("detuning", regime_default, source);
  DetuningRegime regime;
  if (regime_text == "half_detuned") {
    regime = DetuningRegime::kHalfDetuned;
  } else if (regime_text == "three_times_half_detuned") {
    regime = DetuningRegime::kThreeTimesHalfDetuned;
  } else if (regime_text == "custom") {
    regime = DetuningRegime::kCustom;
  } else {
    fail(s.raw("detuning"), fmt::format("{}.detuning '{}' is not half_detuned, "
                                        "three_times_half_detuned or custom",
                                        s.name(), regime_text));
  }
  double slope = 1.0;
  if (regime == DetuningRegime::kCustom) {
    slope = s.number("slope", 1.0, "custom regime default");
  } else if (s.raw("slope")) {
    fail(s.raw("slope"), fmt::format("{}.slope is only allowed with detuning: custom", s.name()));
  }
  const double loss = s.number("excess_loss", loss_default, source);
  return validated(s.raw("fwhm_hz"), s.name(),
                   [&] { return CavityParams(fwhm, regime, loss, slope); });
}

FloorSpec read_floor(Section& s, const std::string& key, const FloorSpec& fallback,
                     const std::string& source) {
  auto n = s.raw(key);
  if (!n) {
    s.record(key, floor_to_string(fallback), Provenance::kPaperDefault, source);
    return fallback;
  }
  if (!n.IsMap()) fail(n, fmt::format("floors.{} must be a mapping", key));
  FloorSpec spec;
  if (n["flat_db"] && n.size() == 1) {
    spec = FlatFloor{s.as_double(n["flat_db"], key + ".flat_db")};
  } else if (n["power_law"] && n.size() == 1) {
    const auto segs = n["power_law"];
    if (!segs.IsSequence()) fail(segs, fmt::format("floors.{}.power_law must be a list", key));
    PowerLawFloor pl;
    for (const auto& seg : segs) {
      if (!seg.IsMap() || !seg["f_corner_hz"] || !seg["exponent"] || !seg["level_db"] ||
          seg.size() != 3) {
        fail(seg, "power-law segment needs exactly f_corner_hz, exponent, level_db");
      }
      pl.segments.push_back({s.as_double(seg["f_corner_hz"], key + ".f_corner_hz"),
                             s.as_double(seg["exponent"], key + ".exponent"),
                             s.as_double(seg["level_db"], key + ".level_db")});
    }
    spec = std::move(pl);
  } else {
    fail(n, fmt::format("floors.{} needs exactly one of flat_db or power_law", key));
  }
  try {
    validate_floor(spec);
  } catch (const ValidationError& e) {
    fail(n, fmt::format("floors.{}: {}", key, e.what()));
  }
  s.record(key, floor_to_string(spec), Provenance::kUser, "");
  return spec;
}

std::vector<BudgetEntry> read_entries(Section& s, const std::string& key, EntryKind kind,
                                      const std::vector<BudgetEntry>& fallback,
                                      const std::string& source) {
  auto n = s.raw(key);
  if (!n) {
    s.record(key, entries_to_string(fallback), Provenance::kPaperDefault, source);
    return fallback;
  }
  if (!n.IsSequence()) fail(n, fmt::format("budget.{} must be a list", key));
  std::vector<BudgetEntry> out;
  for (const auto& e : n) {
    if (!e.IsMap() || !e["name"] || !e["value"]) fail(e, "budget entry needs name and value");
    const auto name = e["name"].as<std::string>();
    const double value = s.as_double(e["value"], key + ".value");
    const double unc = e["uncertainty"] ? s.as_double(e["uncertainty"], key + ".uncertainty") : 0.0;
    out.push_back(validated(e, "budget." + key, [&] { return BudgetEntry(name, value, unc, kind); }));
  }
  s.record(key, entries_to_string(out), Provenance::kUser, "");
  return out;
}

std::optional<Measured> read_stated(Section& s, const std::string& key,
                                    const std::optional<Measured>& fallback,
                                    const std::string& source) {
  auto n = s.raw(key);
  if (!n) {
    s.record(key, fallback ? fmt::format("{}±{}", fmt_num(fallback->value), fmt_num(fallback->uncertainty)) : "none",
             Provenance::kPaperDefault, source);
    return fallback;
  }
  if (n.IsScalar() && n.Scalar() == "none") {
    s.record(key, "none", Provenance::kUser, "");
    return std::nullopt;
  }
  if (!n.IsMap() || !n["value"]) fail(n, fmt::format("budget.{} needs value (and uncertainty)", key));
  Measured m{s.as_double(n["value"], key), n["uncertainty"] ? s.as_double(n["uncertainty"], key) : 0.0};
  s.record(key, fmt::format("{}±{}", fmt_num(m.value), fmt_num(m.uncertainty)), Provenance::kUser, "");
  return m;
}

ScenarioConfig build(const YAML::Node& root) {
  static const std::set<std::string> kSections = {
      "grid", "detection", "beam_splitter", "inloop_cavity", "outofloop_cavity", "squeezer",
      "servo", "floors", "ledger", "budget", "calibration"};
  if (root && !root.IsNull() && !root.IsMap()) fail(root, "scenario must be a YAML mapping");
  if (root && root.IsMap()) {
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      if (!kSections.contains(key)) fail(kv.first, fmt::format("unknown section '{}'", key));
    }
  }

  ScenarioConfig c;
  auto& echo = c.echo;
  const BudgetTable defaults = default_budget_table();

  {
    Section s(root, "grid", echo);
    c.grid.f_min_hz = s.number("f_min_hz", 1e3, "analysed span 1 kHz - 100 kHz");
    c.grid.f_max_hz = s.number("f_max_hz", 1e5, "analysed span 1 kHz - 100 kHz");
    const double n = s.number("points", 201, "201 log-spaced points");
    if (n < 2 || n != std::floor(n)) fail(s.raw("points"), "grid.points must be an integer >= 2");
    c.grid.points = static_cast<std::size_t>(n);
    if (!(c.grid.f_min_hz > 0.0 && c.grid.f_max_hz > c.grid.f_min_hz)) {
      fail(s.raw("f_min_hz"), "grid needs 0 < f_min_hz < f_max_hz");
    }
  }
  {
    Section s(root, "detection", echo);
    const double p = s.number("power_w", 50e-6, "50 uW in-loop detected power");
    const double lambda = s.number("wavelength_m", 1550e-9, "1550 nm fiber laser");
    c.detection = validated(s.raw("power_w"), "detection", [&] { return DetectionParams(p, lambda); });
  }
  {
    Section s(root, "beam_splitter", echo);
    const double r = s.number("reflectivity", 0.99, "99:1 tap, power reflectivity r = 99%");
    c.beam_splitter = validated(s.raw("reflectivity"), "beam_splitter",
                                [&] { return BeamSplitter::from_reflectivity(r); });
  }
  {
    Section s(root, "inloop_cavity", echo);
    c.inloop_cavity = read_cavity(s, 7.5e6, "three_times_half_detuned", 0.016,
                                  "over-coupled converter: 7.5 MHz, ~3x half-detuned, 1.6% loss");
  }
  {
    Section s(root, "outofloop_cavity", echo);
    c.outofloop_cavity = read_cavity(s, 6.8e6, "half_detuned", 0.0,
                                     "impedance-matched witness: 6.8 MHz, half-detuned");
  }
  {
    Section s(root, "squeezer", echo);
    c.squeezing_db = s.number("squeezing_db", 10.6, "10.6 dB squeezed vacuum");
    c.antisqueezing_db = s.number("antisqueezing_db", SqueezerParams::kDefaultAntisqueezingDb,
                                  "inferred: makes 20 mrad jitter cost 0.6 dB");
  }
  {
    Section s(root, "servo", echo);
    auto ug = s.raw("unity_gain_frequency_hz");
    if (!ug || (ug.IsScalar() && ug.Scalar() == "auto")) {
      s.record("unity_gain_frequency_hz", "auto", ug ? Provenance::kUser : Provenance::kPaperDefault,
               "calibrated against the in-loop frequency-noise coupling");
    } else {
      c.unity_gain_frequency_hz = s.as_double(ug, "unity_gain_frequency_hz");
      s.record("unity_gain_frequency_hz", fmt_num(*c.unity_gain_frequency_hz), Provenance::kUser, "");
    }
    const double order = s.number("integrator_order", 1, "single integrator");
    if (order < 1 || order != std::floor(order)) {
      fail(s.raw("integrator_order"), "servo.integrator_order must be an integer >= 1");
    }
    c.integrator_order = static_cast<int>(order);
    c.servo_delay_s = s.number("delay_s", 0.0, "ideal servo");
    auto lp = s.raw("low_pass_corner_hz");
    if (!lp || (lp.IsScalar() && lp.Scalar() == "none")) {
      s.record("low_pass_corner_hz", "none", lp ? Provenance::kUser : Provenance::kPaperDefault,
               "ideal servo");
    } else {
      c.low_pass_corner_hz = s.as_double(lp, "low_pass_corner_hz");
      s.record("low_pass_corner_hz", fmt_num(*c.low_pass_corner_hz), Provenance::kUser, "");
    }
    validated(s.raw("integrator_order"), "servo", [&] {
      return ServoModel(c.unity_gain_frequency_hz.value_or(1.0), c.integrator_order,
                        c.servo_delay_s, c.low_pass_corner_hz);
    });
  }
  {
    Section s(root, "calibration", echo);
    c.calibration_frequency_hz =
        s.number("coupling_frequency_hz", 8e3, "cross-coupling quoted at 8 kHz");
    if (!(c.calibration_frequency_hz > 0.0)) {
      fail(s.raw("coupling_frequency_hz"), "calibration.coupling_frequency_hz must be > 0");
    }
  }
  {
    Section s(root, "floors", echo);
    c.residual_amplitude_rin = read_floor(s, "residual_amplitude_rin", FlatFloor{-157.0},
                                          "amplitude RIN suppressed to -157 dB/Hz");
    c.electronic_noise = read_floor(s, "electronic_noise", FlatFloor{-160.0},
                                    "electronic noise about -160 dB/Hz");
    c.free_running_phase = read_floor(s, "free_running_phase", PowerLawFloor{{{1e3, -2.0, -90.0}}},
                                      "synthetic: white frequency noise, not digitized");
  }
  {
    Section s(root, "budget", echo);
    c.budget.efficiencies = read_entries(s, "efficiencies", EntryKind::kEfficiency,
                                         defaults.efficiencies, "loss table rows");
    c.budget.phase_fluctuations = read_entries(s, "phase_fluctuations_mrad", EntryKind::kMilliradian,
                                               defaults.phase_fluctuations, "phase table rows");
    c.budget.couplings = read_entries(s, "couplings_percent", EntryKind::kPercent,
                                      defaults.couplings, "cross-coupling rows @ 8 kHz");
    c.budget.stated_total_efficiency =
        read_stated(s, "stated_total_efficiency", defaults.stated_total_efficiency, "total 88±0.8 %");
    c.budget.stated_total_phase_mrad =
        read_stated(s, "stated_total_phase_mrad", defaults.stated_total_phase_mrad, "total 20±0.9 mrad");
    c.budget.stated_total_coupling_percent = read_stated(
        s, "stated_total_coupling_percent", defaults.stated_total_coupling_percent, "total 10.6±0.8 %");
  }
  {
    Section s(root, "ledger", echo);
    c.loss_degradation_db = s.number("loss_degradation_db", 1.9, "1.9 dB loss degradation");
    c.phase_degradation_db = s.number("phase_degradation_db", 0.6, "0.6 dB phase degradation");
    c.budget.stated_loss_db = c.loss_degradation_db;
    c.budget.stated_phase_db = c.phase_degradation_db;
    auto cf = s.raw("coupling_fraction");
    if (!cf) {
      s.record("coupling_fraction", "sum of budget.couplings_percent", Provenance::kPaperDefault,
               "total cross-coupling 10.6 %");
    } else {
      c.coupling_fraction = s.as_double(cf, "coupling_fraction");
      s.record("coupling_fraction", fmt_num(*c.coupling_fraction), Provenance::kUser, "");
    }
    c.servo_imperfection_db = s.number("servo_imperfection_db", 0.9,
                                       "calibrated: 5.84 dB after coupling -> 5 dB measured");
    const auto mode = s.text("phase_mode", "linear_sum", "tabulated total is a linear sum");
    if (mode == "linear_sum") {
      c.phase_mode = PhaseSumMode::kLinearSum;
    } else if (mode == "quadrature_sum") {
      c.phase_mode = PhaseSumMode::kQuadratureSum;
    } else {
      fail(s.raw("phase_mode"), "ledger.phase_mode must be linear_sum or quadrature_sum");
    }
    validated(s.raw("loss_degradation_db"), "ledger", [&] {
      c.ledger().validate();
      return 0;
    });
  }
  validated(root, "squeezer", [&] { return c.squeezer(); });
  return c;
}

}  // namespace

ScenarioConfig default_config() { return build(YAML::Node()); }

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  try {
    return build(root);
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void override_grid(ScenarioConfig& config, const GridSpec& grid) {
  config.grid = grid;
  const std::pair<const char*, std::string> values[] = {
      {"grid.f_min_hz", fmt_num(grid.f_min_hz)},
      {"grid.f_max_hz", fmt_num(grid.f_max_hz)},
      {"grid.points", fmt::format("{}", grid.points)}};
  for (const auto& [key, value] : values) {
    for (auto& line : config.echo) {
      if (line.key == key) {
        line.value = value;
        line.provenance = Provenance::kUser;
        line.source = "--grid";
      }
    }
  }
}

std::string format_echo(const std::vector<EchoLine>& echo) {
  std::string out;
  for (const auto& l : echo) {
    out += fmt::format("{} = {}  [provenance: {}", l.key, l.value, provenance_name(l.provenance));
    out += l.source.empty() ? "]\n" : fmt::format("; {}]\n", l.source);
  }
  return out;
}

}  // namespace sqzloop
