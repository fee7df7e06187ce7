#include "tariffsim/tariff.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "tariffsim/errors.hpp"

namespace tariffsim {

namespace {

i128 abs128(i128 v) { return v < 0 ? -v : v; }

i128 gcd128(i128 a, i128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

i128 checked_mul(i128 a, i128 b) {
  i128 out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw Error("128-bit overflow in tariff arithmetic");
  return out;
}

Rate scale_rate(Rate rate, const Fraction& f) {
  return Rate{static_cast<std::int64_t>(
      div_round_half_even(checked_mul(rate.nano_ore_per_kwh, f.num), f.den))};
}

}  // namespace

Fraction BaseCaseInputs::base_share() const {
  validate();
  return Fraction(volumetric_revenue().quanta, total_cost().quanta);
}

void BaseCaseInputs::validate() const {
  if (households <= 0) throw ConfigError("household count must be positive");
  if (total_consumption < 0) throw ConfigError("total consumption must be non-negative");
  const Money v = volumetric_revenue();
  const Money s = subscription_revenue();
  if (v.quanta <= 0 || s.quanta <= 0)
    throw ConfigError("base case needs both volumetric and subscription revenue (0 < s_base < 1)");
}

std::string_view to_string(CalibrationMode mode) {
  return mode == CalibrationMode::OffpeakScaled ? "OffpeakScaled" : "PeakShare";
}

CalibrationMode parse_calibration_mode(std::string_view s) {
  if (s == "OffpeakScaled") return CalibrationMode::OffpeakScaled;
  if (s == "PeakShare") return CalibrationMode::PeakShare;
  throw ConfigError("unknown calibration mode '" + std::string(s) + "'");
}

Fraction TariffScenario::resolved_share(const BaseCaseInputs& inputs) const {
  return share_from_base ? inputs.base_share() : volumetric_share;
}

std::vector<TariffScenario> canonical_scenarios() {
  std::vector<TariffScenario> out;
  const std::array<std::pair<const char*, Fraction>, 5> ladder{{
      {"vol000", Fraction(0, 1)}, {"vol025", Fraction(1, 4)}, {"vol055", Fraction(11, 20)},
      {"vol075", Fraction(3, 4)}, {"vol100", Fraction(1, 1)}}};
  for (const auto& [id, share] : ladder) {
    TariffScenario s;
    s.id = id;
    s.volumetric_share = share;
    out.push_back(s);
  }
  return out;
}

Money ExactAmount::scaled(const Fraction& m) const {
  return Money{static_cast<std::int64_t>(
      div_round_half_even(checked_mul(num, m.num), checked_mul(den, m.den)))};
}

PeakWindow PeakWindow::from_hours(int year_hours, std::vector<int> hours) {
  PeakWindow w;
  w.year_hours = year_hours;
  std::sort(hours.begin(), hours.end());
  hours.erase(std::unique(hours.begin(), hours.end()), hours.end());
  w.mask.assign(static_cast<std::size_t>(year_hours), 0);
  for (int h : hours) {
    if (h < 0 || h >= year_hours) throw Error("peak hour " + std::to_string(h) + " out of range");
    w.mask[static_cast<std::size_t>(h)] = 1;
  }
  w.hours = std::move(hours);
  return w;
}

PeakWindow detect_peak_hours(const SystemLoad& load, const Fraction& fraction) {
  const int hours = load.hours();
  if (hours < 1) throw DegenerateWindow("system load is empty");
  if (!(fraction > Fraction(0, 1)) || !(fraction < Fraction(1, 1)))
    throw DegenerateWindow("peak fraction must lie strictly between 0 and 1");
  const auto k = static_cast<std::size_t>(
      static_cast<i128>(fraction.num) * hours / fraction.den);
  if (k == 0) throw DegenerateWindow("peak window would be empty");

  std::vector<int> order(static_cast<std::size_t>(hours));
  std::iota(order.begin(), order.end(), 0);
  auto by_load = [&](int a, int b) {
    const Wh la = load.energy[static_cast<std::size_t>(a)];
    const Wh lb = load.energy[static_cast<std::size_t>(b)];
    return la != lb ? la > lb : a < b;
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), by_load);
  order.resize(k);
  return PeakWindow::from_hours(hours, std::move(order));
}

std::pair<Wh, Wh> split_consumption(std::span<const std::int32_t> energy,
                                    std::span<const std::uint8_t> faulty, const PeakWindow& window) {
  if (static_cast<int>(energy.size()) != window.year_hours)
    throw MixedYearLength("profile length does not match the peak window");
  Wh peak = 0;
  Wh base = 0;
  for (std::size_t h = 0; h < energy.size(); ++h) {
    if (!faulty.empty() && faulty[h]) continue;
    if (window.mask[h]) peak += energy[h];
    else base += energy[h];
  }
  return {peak, base};
}

std::pair<Wh, Wh> split_consumption(const HourlyProfile& profile, const PeakWindow& window) {
  return split_consumption(profile.energy, profile.faulty, window);
}

std::pair<Wh, Wh> split_consumption(std::span<const Wh> hourly, const PeakWindow& window) {
  if (static_cast<int>(hourly.size()) != window.year_hours)
    throw MixedYearLength("series length does not match the peak window");
  Wh peak = 0;
  Wh base = 0;
  for (std::size_t h = 0; h < hourly.size(); ++h) (window.mask[h] ? peak : base) += hourly[h];
  return {peak, base};
}

TouCalibration calibrate_tou(const BaseCaseInputs& inputs, const Fraction& recovery_factor, Wh q_peak,
                             Wh q_base, CalibrationMode mode) {
  inputs.validate();
  if (q_peak <= 0) throw ZeroPeakEnergy("no energy falls inside the peak window");
  if (q_base <= 0) throw Error("no energy falls outside the peak window");
  if (q_peak + q_base != inputs.total_consumption)
    throw Error("peak and off-peak energy do not add up to the base-case total");
  if (!(recovery_factor > Fraction(0, 1)) || recovery_factor > Fraction(1, 1))
    throw ConfigError("recovery factor must lie in (0, 1]");

  // Volumetric revenue in Wh * nano-øre/kWh, unrounded.
  const i128 revenue = static_cast<i128>(inputs.total_consumption) * inputs.flat_rate.nano_ore_per_kwh;
  TouCalibration cal;
  cal.q_peak = q_peak;
  cal.q_base = q_base;
  cal.mode = mode;
  cal.recovery_factor = recovery_factor;
  if (mode == CalibrationMode::OffpeakScaled) {
    cal.base = scale_rate(inputs.flat_rate, recovery_factor);
    const i128 remainder = revenue - static_cast<i128>(q_base) * cal.base.nano_ore_per_kwh;
    cal.peak = Rate{static_cast<std::int64_t>(div_round_half_even(remainder, q_peak))};
  } else {
    const Fraction& rho = recovery_factor;
    cal.peak = Rate{static_cast<std::int64_t>(
        div_round_half_even(checked_mul(revenue, rho.den - rho.num), checked_mul(q_peak, rho.den)))};
    cal.base = Rate{static_cast<std::int64_t>(
        div_round_half_even(checked_mul(revenue, rho.num), checked_mul(q_base, rho.den)))};
  }
  return cal;
}

TariffRates solve_scenario(const BaseCaseInputs& inputs, const TariffScenario& scenario,
                           const TouCalibration& calibration) {
  inputs.validate();
  const Fraction s = scenario.resolved_share(inputs);
  if (s < Fraction(0, 1) || s > Fraction(1, 1)) throw ConfigError("volumetric share must lie in [0, 1]");
  const Money total = inputs.total_cost();
  const Money volumetric = inputs.volumetric_revenue();

  TariffRates r;
  r.scenario_id = scenario.id;
  r.share = s;
  r.scale = s * Fraction(total.quanta, volumetric.quanta);
  r.calibration = calibration;

  // (1 - s) * T / N, reduced before any later scaling.
  i128 num = checked_mul(s.den - s.num, total.quanta);
  i128 den = checked_mul(s.den, inputs.households);
  const i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  r.fee_exact = ExactAmount{num, den};
  r.fee = r.fee_exact.rounded();
  r.base_eff = scale_rate(calibration.base, r.scale);
  r.peak_eff = scale_rate(calibration.peak, r.scale);
  return r;
}

Money revenue_identity_residual(const BaseCaseInputs& inputs, const TariffRates& rates) {
  const Money subs{rates.fee.quanta * inputs.households};
  const Money vol = charge(rates.calibration.q_base, rates.base_eff) + charge(rates.calibration.q_peak, rates.peak_eff);
  return subs + vol - inputs.total_cost();
}

}  // namespace tariffsim
