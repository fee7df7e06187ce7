#include "tariffsim/redistribution.hpp"

#include "tariffsim/errors.hpp"

namespace tariffsim {

void RedistributionPolicy::validate() const {
  if (factor > Fraction(1, 1)) throw ConfigError("redistribution factor must lie in [0, 1]");
}

std::vector<Fraction> default_factor_grid() {
  std::vector<Fraction> out;
  for (int k = 10; k >= 0; --k) out.emplace_back(k, 10);
  return out;
}

Fraction redistribution_multiplier(const Fraction& r, std::int64_t n_low, std::int64_t n_other) {
  if (r > Fraction(1, 1)) throw ConfigError("redistribution factor must lie in [0, 1]");
  if (n_low < 0 || n_other < 0) throw ConfigError("household counts must be non-negative");
  if (r == Fraction(1, 1)) return Fraction(1, 1);
  if (n_other == 0) throw NoSubsidizers("no medium or high status households to carry the transfer");
  return Fraction(1, 1) + (Fraction(1, 1) - r) * Fraction(n_low, n_other);
}

SubscriptionMultipliers subscription_vector(const RedistributionPolicy& policy, const GroupCensus& census) {
  policy.validate();
  SubscriptionMultipliers out;
  out.factor = policy.factor;
  for (int i = 0; i < kStatusTechSlots; ++i) {
    const std::int64_t n = census[static_cast<std::size_t>(i)];
    if (n < 0) throw ConfigError("negative census count");
    (StatusTechGroup::from_index(i).status == Status::Low ? out.n_low : out.n_other) += n;
  }
  out.x_incr = redistribution_multiplier(policy.factor, out.n_low, out.n_other);
  for (int i = 0; i < kStatusTechSlots; ++i)
    out.by_group[static_cast<std::size_t>(i)] =
        StatusTechGroup::from_index(i).status == Status::Low ? policy.factor : out.x_incr;

  // n_low * r + n_other * x == N, cross-multiplied.
  const Fraction& r = policy.factor;
  const Fraction& x = out.x_incr;
  const i128 lhs = static_cast<i128>(out.n_low) * r.num * x.den + static_cast<i128>(out.n_other) * x.num * r.den;
  const i128 rhs = static_cast<i128>(out.n_low + out.n_other) * r.den * x.den;
  if (lhs != rhs) throw Error("subscription multipliers do not conserve revenue");
  return out;
}

}  // namespace tariffsim
