#include "sqzloop/budget.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "sqzloop/errors.hpp"
#include "sqzloop/noise_core.hpp"
#include "sqzloop/optics.hpp"

namespace sqzloop {

BudgetEntry::BudgetEntry(std::string n, double v, double u, EntryKind k)
    : name(std::move(n)), value(v), uncertainty(u), kind(k) {
  if (!std::isfinite(v) || !std::isfinite(u) || u < 0.0) {
    throw DomainError(fmt::format("budget entry '{}': bad value/uncertainty ({}, {})", name, v, u));
  }
  switch (kind) {
    case EntryKind::kEfficiency:
      if (!(v > 0.0 && v <= 1.0)) {
        throw DomainError(fmt::format("efficiency '{}' = {} outside (0, 1]", name, v));
      }
      break;
    case EntryKind::kMilliradian:
    case EntryKind::kPercent:
      if (v < 0.0) throw DomainError(fmt::format("budget entry '{}' = {} is negative", name, v));
      break;
  }
}

namespace {

void require_kind(std::span<const BudgetEntry> entries, EntryKind kind, const char* op) {
  for (const auto& e : entries) {
    if (e.kind != kind) {
      throw StructuralError(fmt::format("{}: entry '{}' has the wrong kind", op, e.name));
    }
  }
}

}  // namespace

Measured total_efficiency(std::span<const BudgetEntry> entries) {
  require_kind(entries, EntryKind::kEfficiency, "total_efficiency");
  double product = 1.0;
  double rel2 = 0.0;
  for (const auto& e : entries) {
    product *= e.value;
    const double rel = e.uncertainty / e.value;
    rel2 += rel * rel;
  }
  return {product, product * std::sqrt(rel2)};
}

Measured total_phase_fluctuation(std::span<const BudgetEntry> entries, PhaseSumMode mode) {
  require_kind(entries, EntryKind::kMilliradian, "total_phase_fluctuation");
  if (mode == PhaseSumMode::kLinearSum) {
    double sum = 0.0;
    double u2 = 0.0;
    for (const auto& e : entries) {
      sum += e.value;
      u2 += e.uncertainty * e.uncertainty;
    }
    return {sum, std::sqrt(u2)};
  }
  double sq = 0.0;
  double weighted = 0.0;
  for (const auto& e : entries) {
    sq += e.value * e.value;
    weighted += e.value * e.value * e.uncertainty * e.uncertainty;
  }
  const double total = std::sqrt(sq);
  return {total, total > 0.0 ? std::sqrt(weighted) / total : 0.0};
}

Measured coupling_fraction_total(std::span<const BudgetEntry> entries) {
  require_kind(entries, EntryKind::kPercent, "coupling_fraction_total");
  double sum = 0.0;
  double u2 = 0.0;
  for (const auto& e : entries) {
    sum += e.value;
    u2 += e.uncertainty * e.uncertainty;
  }
  return {sum / 100.0, std::sqrt(u2) / 100.0};
}

double enhancement_after_coupling(double e_db, double coupling) {
  if (!std::isfinite(coupling) || coupling < 0.0) {
    throw DomainError(fmt::format("coupling fraction must be >= 0, got {}", coupling));
  }
  if (std::isnan(e_db)) throw DomainError("enhancement_after_coupling: NaN enhancement");
  const double residual = std::isinf(e_db) && e_db > 0.0 ? 0.0 : std::pow(10.0, -e_db / 10.0);
  return -10.0 * std::log10(residual + coupling);
}

void EnhancementLedger::validate() const {
  const double fields[] = {initial_squeezing_db, loss_degradation_db, phase_degradation_db,
                           coupling_fraction, servo_imperfection_db};
  for (double f : fields) {
    if (!std::isfinite(f)) throw DomainError("enhancement ledger has a non-finite field");
  }
  if (loss_degradation_db < 0.0 || phase_degradation_db < 0.0 || servo_imperfection_db < 0.0) {
    throw DomainError("ledger degradations must be >= 0 dB");
  }
  if (coupling_fraction < 0.0) throw DomainError("ledger coupling fraction must be >= 0");
}

LedgerStages ledger_chain(const EnhancementLedger& ledger) {
  ledger.validate();
  LedgerStages out;
  auto floor_at_zero = [&out](double v, const char* name) {
    if (v <= 0.0) {
      out.floored.emplace_back(name);
      return 0.0;
    }
    return v;
  };
  out.after_loss_and_phase_db = floor_at_zero(
      ledger.initial_squeezing_db - ledger.loss_degradation_db - ledger.phase_degradation_db,
      "after_loss_and_phase");
  out.after_coupling_db = floor_at_zero(
      enhancement_after_coupling(out.after_loss_and_phase_db, ledger.coupling_fraction),
      "after_coupling");
  out.final_db = floor_at_zero(out.after_coupling_db - ledger.servo_imperfection_db, "final");
  return out;
}

BudgetTable default_budget_table() {
  using K = EntryKind;
  BudgetTable t;
  t.efficiencies = {
      {"OPO escape efficiency", 0.97, 0.005, K::kEfficiency},
      {"Efficiency of interference", 0.985, 0.002, K::kEfficiency},
      {"Quantum efficiency of photodiodes", 0.99, 0.002, K::kEfficiency},
      {"Over-coupled cavity", 0.984, 0.005, K::kEfficiency},
      {"Laser propagation efficiency", 0.96, 0.005, K::kEfficiency},
  };
  t.phase_fluctuations = {
      {"OPO cavity length", 2.0, 0.3, K::kMilliradian},
      {"Relative phase between squeezed and frequency-shifted light", 7.0, 0.5, K::kMilliradian},
      {"Relative phase of squeezed and local oscillator", 11.0, 0.6, K::kMilliradian},
  };
  t.couplings = {
      {"Electronic noise", 2.3, 0.1, K::kPercent},
      {"Residual laser excess amplitude noise", 6.2, 0.2, K::kPercent},
      {"In-loop frequency noise", 2.1, 0.5, K::kPercent},
  };
  t.stated_total_efficiency = Measured{0.88, 0.008};
  t.stated_total_phase_mrad = Measured{20.0, 0.9};
  t.stated_total_coupling_percent = Measured{10.6, 0.8};
  t.stated_loss_db = 1.9;
  t.stated_phase_db = 0.6;
  t.stated_coupling_db = 2.2;
  return t;
}

EnhancementLedger ledger_from_table(const BudgetTable& table, double initial_squeezing_db,
                                    double servo_imperfection_db) {
  EnhancementLedger l;
  l.initial_squeezing_db = initial_squeezing_db;
  l.loss_degradation_db = table.stated_loss_db;
  l.phase_degradation_db = table.stated_phase_db;
  l.coupling_fraction = coupling_fraction_total(table.couplings).value;
  l.servo_imperfection_db = servo_imperfection_db;
  return l;
}

BudgetReport build_budget_report(const BudgetTable& table, const EnhancementLedger& ledger,
                                 double antisqueezing_db, PhaseSumMode phase_mode) {
  BudgetReport r;
  r.table = table;
  r.efficiency_product = total_efficiency(table.efficiencies);
  r.phase_linear_mrad = total_phase_fluctuation(table.phase_fluctuations, PhaseSumMode::kLinearSum);
  r.phase_quadrature_mrad =
      total_phase_fluctuation(table.phase_fluctuations, PhaseSumMode::kQuadratureSum);
  r.coupling_fraction = coupling_fraction_total(table.couplings);
  r.phase_mode = phase_mode;
  r.ledger = ledger;
  r.stages = ledger_chain(ledger);

  const double jitter_mrad = phase_mode == PhaseSumMode::kLinearSum
                                 ? r.phase_linear_mrad.value
                                 : r.phase_quadrature_mrad.value;
  const auto initial = QuadratureVariances::from_db(
      ledger.initial_squeezing_db, std::max(antisqueezing_db, ledger.initial_squeezing_db));
  const auto lossy = apply_loss(initial, r.efficiency_product.value);
  const auto jittered = apply_phase_jitter(lossy, jitter_mrad * 1e-3);
  r.physical_loss_degradation_db = ledger.initial_squeezing_db + db_from_linear(lossy.s_x);
  r.physical_phase_degradation_db = db_from_linear(jittered.s_x) - db_from_linear(lossy.s_x);
  r.physical_detected_squeezing_db = -db_from_linear(jittered.s_x);

  if (table.stated_total_efficiency) {
    const auto& stated = *table.stated_total_efficiency;
    if (std::abs(r.efficiency_product.value - stated.value) > stated.uncertainty) {
      r.discrepancies.push_back(
          {"efficiency_product", r.efficiency_product.value, stated.value,
           fmt::format("product of listed efficiencies differs from the stated total by {:.4f}",
                       r.efficiency_product.value - stated.value)});
    }
  }
  if (std::abs(r.physical_loss_degradation_db - ledger.loss_degradation_db) > kLossDbTolerance) {
    r.discrepancies.push_back(
        {"loss_degradation_db", r.physical_loss_degradation_db, ledger.loss_degradation_db,
         "eta*V + (1 - eta) applied to the initial state disagrees with the ledger's "
         "additive loss degradation"});
  }
  return r;
}

}  // namespace sqzloop
