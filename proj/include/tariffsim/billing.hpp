#pragma once

// Household bills, base-case bills, equity deltas and the revenue audit.

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "tariffsim/domain.hpp"
#include "tariffsim/money.hpp"
#include "tariffsim/tariff.hpp"

namespace tariffsim {

struct BillBreakdown {
  Money subscription;
  Money offpeak;
  Money peak;
  Money total;

  std::string scenario_id;
  Fraction factor{1, 1};
  std::optional<StatusTechGroup> group;

  friend bool operator==(const BillBreakdown& a, const BillBreakdown& b) {
    return a.subscription == b.subscription && a.offpeak == b.offpeak && a.peak == b.peak && a.total == b.total;
  }
};

/// Each line rounded half-even to the quantum, then summed.
BillBreakdown compute_bill(Wh q_peak, Wh q_base, const TariffRates& rates, const Fraction& multiplier);

/// Flat tariff: the whole volumetric charge is booked as off-peak.
BillBreakdown bill_base_case(Wh q_total, const BaseCaseInputs& inputs);

struct EquityDelta {
  Money base_total;
  Money new_total;

  double value() const;
  /// Percent with `decimals` places, rounded half-even from the exact ratio.
  std::string percent_string(int decimals = 2) const;
};

/// Throws ZeroBaseBill when the base bill is not positive.
EquityDelta equity_delta(const BillBreakdown& bill, const BillBreakdown& base);
EquityDelta equity_delta(Money bill_total, Money base_total);

struct AuditResult {
  Money residual;             // sum of bills - T
  std::int64_t households = 0;
  std::int64_t groups = 0;
  bool passed = false;

  /// N * 0.5 + groups, in quanta (may be a half quantum).
  double tolerance_quanta() const { return 0.5 * static_cast<double>(households) + static_cast<double>(groups); }
};

AuditResult audit_revenue(std::span<const Money> totals, Money target, std::int64_t groups);
/// Audit from an already accumulated sum.
AuditResult audit_revenue_sum(Money sum, std::int64_t households, Money target, std::int64_t groups);

/// Mean of `total` over `count` households, rounded half-even.
Money average(Money total, std::int64_t count);

}  // namespace tariffsim
