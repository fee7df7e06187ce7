#pragma once

// Exact fixed-point quantities used throughout the engine.
//
//   energy : integer watt-hours
//   money  : integer quanta of 1e-4 DKK
//   rates  : integer nano-øre per kWh
//
// Products of energy and rate are formed in 128-bit integers and rounded
// half-even exactly once, so every sum is associative and partition-free.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace tariffsim {

using i128 = __int128;
using Wh = std::int64_t;

inline constexpr std::int64_t kQuantaPerDkk = 10'000;
inline constexpr std::int64_t kNanoOrePerOre = 1'000'000'000;
// Wh * (nano-øre/kWh) = 1e-12 øre = 1e-10 quanta.
inline constexpr std::int64_t kChargeDivisor = 10'000'000'000;

/// Integer division rounded half to even. `den` must be non-zero.
i128 div_round_half_even(i128 num, i128 den);

/// Money in quanta of 1e-4 DKK.
struct Money {
  std::int64_t quanta = 0;

  static Money from_dkk(double dkk);
  /// Parses a plain decimal string such as "428.8" or "-12.3456" exactly.
  static Money parse_dkk(std::string_view text);

  double dkk() const { return static_cast<double>(quanta) / kQuantaPerDkk; }
  /// Renders with `decimals` fractional digits, rounding half-even.
  std::string to_dkk_string(int decimals = 2) const;

  Money& operator+=(Money o) { quanta += o.quanta; return *this; }
  Money& operator-=(Money o) { quanta -= o.quanta; return *this; }
  friend Money operator+(Money a, Money b) { return Money{a.quanta + b.quanta}; }
  friend Money operator-(Money a, Money b) { return Money{a.quanta - b.quanta}; }
  friend auto operator<=>(const Money&, const Money&) = default;
};

/// A volumetric rate in nano-øre per kWh.
struct Rate {
  std::int64_t nano_ore_per_kwh = 0;

  static Rate from_ore_per_kwh(double ore);
  static Rate parse_ore_per_kwh(std::string_view text);
  double ore_per_kwh() const {
    return static_cast<double>(nano_ore_per_kwh) / kNanoOrePerOre;
  }
  std::string to_ore_string(int decimals = 4) const;
  friend auto operator<=>(const Rate&, const Rate&) = default;
};

/// Charge for `energy` at `rate`, rounded half-even to one quantum.
Money charge(Wh energy, Rate rate);

/// Converts a decimal kWh string with at most three fractional digits to Wh.
/// Returns false on malformed input or excess precision.
bool parse_kwh_exact(std::string_view text, Wh& out);

/// Renders Wh as kWh with three decimals.
std::string format_kwh(Wh energy);

/// Non-negative rational with 64-bit terms, kept in lowest terms.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction() = default;
  Fraction(std::int64_t n, std::int64_t d);

  static Fraction from_int(std::int64_t v) { return Fraction(v, 1); }
  /// Decimal string such as "0.55" or "1", up to 12 fractional digits.
  static Fraction parse_decimal(std::string_view text);
  /// Either a decimal or "num/den".
  static Fraction parse(std::string_view text);
  /// Nearest fraction with denominator 1e9.
  static Fraction from_double(double v);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  /// Exact decimal when it terminates within 12 digits, else "num/den".
  std::string to_decimal_string(int min_decimals = 1) const;

  friend bool operator==(const Fraction& a, const Fraction& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
    return static_cast<i128>(a.num) * b.den <=> static_cast<i128>(b.num) * a.den;
  }
};

Fraction operator+(const Fraction& a, const Fraction& b);
Fraction operator-(const Fraction& a, const Fraction& b);
Fraction operator*(const Fraction& a, const Fraction& b);
Fraction operator/(const Fraction& a, const Fraction& b);

std::string to_string(i128 v);

/// num / den with `decimals` fractional digits, rounded half-even.
std::string format_fixed(i128 num, i128 den, int decimals);

}  // namespace tariffsim
