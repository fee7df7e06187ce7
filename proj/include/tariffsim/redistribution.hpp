#pragma once

// Subscription transfer away from Low-status households.

#include <array>
#include <cstdint>
#include <vector>

#include "tariffsim/domain.hpp"
#include "tariffsim/money.hpp"
#include "tariffsim/tariff.hpp"

namespace tariffsim {

struct RedistributionPolicy {
  Fraction factor{1, 1};  // r: share of the fee still paid by Low households

  void validate() const;
};

/// 0.0, 0.1, ..., 1.0 listed from 1.0 down.
std::vector<Fraction> default_factor_grid();

/// Household counts per status x tech slot (StatusTechGroup::index()).
using GroupCensus = std::array<std::int64_t, kStatusTechSlots>;

/// x^incr = 1 + (1 - r) * n_low / n_other, exactly.
Fraction redistribution_multiplier(const Fraction& r, std::int64_t n_low, std::int64_t n_other);

struct SubscriptionMultipliers {
  Fraction factor;
  Fraction x_incr;
  std::int64_t n_low = 0;
  std::int64_t n_other = 0;
  std::array<Fraction, kStatusTechSlots> by_group;

  const Fraction& of(StatusTechGroup g) const { return by_group[static_cast<std::size_t>(g.index())]; }
  /// round(m_g * fee) from the exact fee.
  Money payment(StatusTechGroup g, const ExactAmount& fee) const { return fee.scaled(of(g)); }
};

/// Throws NoSubsidizers if Low households would be subsidized by nobody.
SubscriptionMultipliers subscription_vector(const RedistributionPolicy& policy, const GroupCensus& census);

}  // namespace tariffsim
