#include "tariffsim/billing.hpp"

#include "tariffsim/errors.hpp"

namespace tariffsim {

BillBreakdown compute_bill(Wh q_peak, Wh q_base, const TariffRates& rates, const Fraction& multiplier) {
  if (q_peak < 0 || q_base < 0) throw Error("negative energy in bill");
  BillBreakdown b;
  b.subscription = rates.fee_exact.scaled(multiplier);
  b.offpeak = charge(q_base, rates.base_eff);
  b.peak = charge(q_peak, rates.peak_eff);
  b.total = b.subscription + b.offpeak + b.peak;
  b.scenario_id = rates.scenario_id;
  b.factor = multiplier;
  return b;
}

BillBreakdown bill_base_case(Wh q_total, const BaseCaseInputs& inputs) {
  if (q_total < 0) throw Error("negative energy in bill");
  BillBreakdown b;
  b.subscription = inputs.subscription;
  b.offpeak = charge(q_total, inputs.flat_rate);
  b.total = b.subscription + b.offpeak;
  b.scenario_id = "base";
  return b;
}

double EquityDelta::value() const {
  return static_cast<double>(new_total.quanta - base_total.quanta) / static_cast<double>(base_total.quanta);
}

std::string EquityDelta::percent_string(int decimals) const {
  i128 scale = 100;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const i128 v = div_round_half_even(static_cast<i128>(new_total.quanta - base_total.quanta) * scale,
                                     base_total.quanta);
  // Reuse the fixed-point renderer: v is in units of 10^-decimals percent.
  const bool neg = v < 0;
  std::string digits = to_string(neg ? -v : v);
  if (decimals > 0) {
    if (digits.size() <= static_cast<std::size_t>(decimals))
      digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
    digits.insert(digits.size() - static_cast<std::size_t>(decimals), ".");
  }
  return (neg ? "-" : "") + digits;
}

EquityDelta equity_delta(Money bill_total, Money base_total) {
  if (base_total.quanta <= 0) throw ZeroBaseBill("base-case bill is zero");
  return EquityDelta{base_total, bill_total};
}

EquityDelta equity_delta(const BillBreakdown& bill, const BillBreakdown& base) {
  return equity_delta(bill.total, base.total);
}

AuditResult audit_revenue_sum(Money sum, std::int64_t households, Money target, std::int64_t groups) {
  AuditResult a;
  a.residual = sum - target;
  a.households = households;
  a.groups = groups;
  const i128 twice = 2 * static_cast<i128>(a.residual.quanta < 0 ? -a.residual.quanta : a.residual.quanta);
  a.passed = twice <= static_cast<i128>(households) + 2 * static_cast<i128>(groups);
  return a;
}

AuditResult audit_revenue(std::span<const Money> totals, Money target, std::int64_t groups) {
  Money sum;
  for (Money m : totals) sum += m;
  return audit_revenue_sum(sum, static_cast<std::int64_t>(totals.size()), target, groups);
}

Money average(Money total, std::int64_t count) {
  if (count <= 0) return Money{};
  return Money{static_cast<std::int64_t>(div_round_half_even(total.quanta, count))};
}

}  // namespace tariffsim
