#pragma once

// Peak-window detection, two-block ToU calibration at the base case, and
// the revenue-neutral subscription/volumetric split of each scenario.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tariffsim/load.hpp"
#include "tariffsim/metering.hpp"
#include "tariffsim/money.hpp"

namespace tariffsim {

/// The flat base-case tariff and the population it recovers cost from.
struct BaseCaseInputs {
  Rate flat_rate;                 // øre/kWh
  Money subscription;             // DKK/year per household
  std::int64_t households = 0;
  Wh total_consumption = 0;

  Money volumetric_revenue() const { return charge(total_consumption, flat_rate); }
  Money subscription_revenue() const { return Money{subscription.quanta * households}; }
  Money total_cost() const { return volumetric_revenue() + subscription_revenue(); }
  /// V_base / T.
  Fraction base_share() const;
  /// Throws ConfigError unless T > 0 and 0 < V/T < 1.
  void validate() const;
};

enum class CalibrationMode { OffpeakScaled, PeakShare };

std::string_view to_string(CalibrationMode mode);
CalibrationMode parse_calibration_mode(std::string_view s);

struct TariffScenario {
  std::string id;
  Fraction volumetric_share;
  /// When set the volumetric share is the base case's own V/T.
  bool share_from_base = false;
  Fraction recovery_factor{4, 5};
  Fraction peak_fraction{1, 20};
  CalibrationMode mode = CalibrationMode::OffpeakScaled;

  Fraction resolved_share(const BaseCaseInputs& inputs) const;
};

/// Volumetric shares 0, 0.25, 0.55, 0.75 and 1 with default ToU parameters.
std::vector<TariffScenario> canonical_scenarios();

struct TouCalibration {
  Rate base;
  Rate peak;
  Wh q_peak = 0;
  Wh q_base = 0;
  CalibrationMode mode = CalibrationMode::OffpeakScaled;
  Fraction recovery_factor;
};

/// Exact subscription fee (1 - s) * T / N in quanta, as a rational.
struct ExactAmount {
  i128 num = 0;
  i128 den = 1;
  Money rounded() const { return Money{static_cast<std::int64_t>(div_round_half_even(num, den))}; }
  /// round(this * m), rounding once.
  Money scaled(const Fraction& m) const;
};

struct TariffRates {
  std::string scenario_id;
  Fraction share;        // s
  Fraction scale;        // f(s) = s / s_base
  ExactAmount fee_exact;
  Money fee;             // fee_exact rounded to the quantum
  Rate base_eff;
  Rate peak_eff;
  TouCalibration calibration;
};

PeakWindow detect_peak_hours(const SystemLoad& load, const Fraction& fraction);

/// (q_peak, q_base) over non-faulty slots.
std::pair<Wh, Wh> split_consumption(std::span<const std::int32_t> energy,
                                    std::span<const std::uint8_t> faulty, const PeakWindow& window);
std::pair<Wh, Wh> split_consumption(const HourlyProfile& profile, const PeakWindow& window);
std::pair<Wh, Wh> split_consumption(std::span<const Wh> hourly_totals, const PeakWindow& window);

TouCalibration calibrate_tou(const BaseCaseInputs& inputs, const Fraction& recovery_factor, Wh q_peak,
                             Wh q_base, CalibrationMode mode = CalibrationMode::OffpeakScaled);

TariffRates solve_scenario(const BaseCaseInputs& inputs, const TariffScenario& scenario,
                           const TouCalibration& calibration);

/// N * fee + volumetric revenue at the effective rates - T, in quanta.
Money revenue_identity_residual(const BaseCaseInputs& inputs, const TariffRates& rates);

}  // namespace tariffsim
