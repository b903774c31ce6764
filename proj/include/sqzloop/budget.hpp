#pragma once

// Degradation ledger for the squeezing enhancement: cascaded efficiencies,
// phase-fluctuation totals, noise cross-coupling totals and the dB chain
// initial squeezing -> loss/phase -> cross-coupling -> servo imperfection.
//
// The ledger subtracts loss and phase degradations additively in dB. That is
// bookkeeping, not physics; the physical variance model lives in optics.hpp
// and the report carries both so their disagreement stays visible.

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sqzloop {

enum class EntryKind { kEfficiency, kMilliradian, kPercent };

struct BudgetEntry {
  BudgetEntry(std::string name, double value, double uncertainty, EntryKind kind);

  std::string name;
  double value;
  double uncertainty;
  EntryKind kind;
};

// Value with a one-sigma uncertainty.
struct Measured {
  double value = 0.0;
  double uncertainty = 0.0;
};

enum class PhaseSumMode { kLinearSum, kQuadratureSum };

// Product of efficiencies; relative uncertainties add in quadrature.
Measured total_efficiency(std::span<const BudgetEntry> entries);

// Linear sum reproduces the tabulated 20 mrad; quadrature sum is what
// independent jitters would physically give.
Measured total_phase_fluctuation(std::span<const BudgetEntry> entries, PhaseSumMode mode);

// Sum of percentages, as a fraction.
Measured coupling_fraction_total(std::span<const BudgetEntry> entries);

// Enhancement left after an uncorrelated noise contribution of `coupling`
// (fraction of the shot-noise reference) is added to the squeezed level.
double enhancement_after_coupling(double e_db, double coupling);

struct EnhancementLedger {
  double initial_squeezing_db = 0.0;
  double loss_degradation_db = 0.0;
  double phase_degradation_db = 0.0;
  double coupling_fraction = 0.0;
  double servo_imperfection_db = 0.0;

  void validate() const;
};

struct LedgerStages {
  double after_loss_and_phase_db = 0.0;  // stage 1
  double after_coupling_db = 0.0;        // stage 2
  double final_db = 0.0;                 // stage 3
  // Names of stages that went non-positive and were floored at 0 dB.
  std::vector<std::string> floored;
};

LedgerStages ledger_chain(const EnhancementLedger& ledger);

// The three budget groups plus the totals and dB degradations they
// are stated to produce. Stated totals are optional; absent ones are not
// cross-checked.
struct BudgetTable {
  std::vector<BudgetEntry> efficiencies;
  std::vector<BudgetEntry> phase_fluctuations;
  std::vector<BudgetEntry> couplings;

  std::optional<Measured> stated_total_efficiency;
  std::optional<Measured> stated_total_phase_mrad;
  std::optional<Measured> stated_total_coupling_percent;

  double stated_loss_db = 0.0;
  double stated_phase_db = 0.0;
  double stated_coupling_db = 0.0;
};

// Loss, phase and cross-coupling rows of the demonstrated squeezed-light
// phase stabilization (efficiencies in %, jitters in mrad, couplings in %
// at 8 kHz).
BudgetTable default_budget_table();

struct Discrepancy {
  std::string name;
  double computed = 0.0;
  double stated = 0.0;
  std::string note;
};

struct BudgetReport {
  BudgetTable table;
  Measured efficiency_product;
  Measured phase_linear_mrad;
  Measured phase_quadrature_mrad;
  Measured coupling_fraction;
  PhaseSumMode phase_mode = PhaseSumMode::kLinearSum;

  EnhancementLedger ledger;
  LedgerStages stages;

  // Physical model: loss then Gaussian jitter applied to the initial state.
  double physical_loss_degradation_db = 0.0;
  double physical_phase_degradation_db = 0.0;
  double physical_detected_squeezing_db = 0.0;

  std::vector<Discrepancy> discrepancies;
};

// Loss-dB mismatches beyond this are reported.
inline constexpr double kLossDbTolerance = 0.1;

// Ledger defaults come from the table's stated dB columns and its coupling
// sum; callers override fields of the returned ledger as needed.
EnhancementLedger ledger_from_table(const BudgetTable& table, double initial_squeezing_db,
                                    double servo_imperfection_db);

BudgetReport build_budget_report(const BudgetTable& table, const EnhancementLedger& ledger,
                                 double antisqueezing_db,
                                 PhaseSumMode phase_mode = PhaseSumMode::kLinearSum);

}  // namespace sqzloop
