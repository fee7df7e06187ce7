#include "tariffsim/money.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
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

Fraction reduce(i128 num, i128 den) {
  if (den == 0) throw Error("fraction with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr i128 lim = std::numeric_limits<std::int64_t>::max();
  if (abs128(num) > lim || den > lim) throw Error("fraction overflow");
  Fraction f;
  f.num = static_cast<std::int64_t>(num);
  f.den = static_cast<std::int64_t>(den);
  return f;
}

// Parses "[-]digits[.digits]" into an integer scaled by 10^scale. Returns
// false if the text is malformed or carries more than `scale` decimals.
bool parse_scaled(std::string_view text, int scale, i128& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) return false;
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) return false;
  i128 value = 0;
  int decimals = -1;
  bool any_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (decimals >= 0) return false;
      decimals = 0;
      continue;
    }
    if (c < '0' || c > '9') return false;
    any_digit = true;
    if (decimals >= 0) {
      if (decimals == scale) return false;
      ++decimals;
    }
    value = value * 10 + (c - '0');
    if (value > (static_cast<i128>(1) << 100)) return false;
  }
  if (!any_digit) return false;
  for (int d = std::max(decimals, 0); d < scale; ++d) value *= 10;
  out = negative ? -value : value;
  return true;
}

std::string fixed_string(i128 scaled, int scale) {
  bool negative = scaled < 0;
  std::string digits = to_string(abs128(scaled));
  if (scale > 0) {
    if (static_cast<int>(digits.size()) <= scale)
      digits.insert(0, static_cast<std::size_t>(scale + 1 - static_cast<int>(digits.size())), '0');
    digits.insert(digits.size() - static_cast<std::size_t>(scale), ".");
  }
  return negative ? "-" + digits : digits;
}

}  // namespace

std::string to_string(i128 v) {
  if (v == 0) return "0";
  bool negative = v < 0;
  // Magnitude of the most negative value still fits once split into digits.
  std::string s;
  while (v != 0) {
    int digit = static_cast<int>(v % 10);
    s.push_back(static_cast<char>('0' + (digit < 0 ? -digit : digit)));
    v /= 10;
  }
  if (negative) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

i128 div_round_half_even(i128 num, i128 den) {
  if (den == 0) throw Error("division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 q = num / den;
  i128 r = num % den;
  if (r == 0) return q;
  // C++ truncates toward zero; move to floor first.
  if (r < 0) {
    q -= 1;
    r += den;
  }
  i128 twice = 2 * r;
  if (twice > den || (twice == den && (q % 2 != 0))) q += 1;
  return q;
}

Money Money::from_dkk(double dkk) {
  return Money{static_cast<std::int64_t>(std::llround(dkk * kQuantaPerDkk))};
}

Money Money::parse_dkk(std::string_view text) {
  i128 v = 0;
  if (!parse_scaled(text, 4, v)) throw FormatError("invalid DKK amount: '" + std::string(text) + "'");
  return Money{static_cast<std::int64_t>(v)};
}

std::string Money::to_dkk_string(int decimals) const {
  decimals = std::clamp(decimals, 0, 4);
  i128 div = 1;
  for (int i = decimals; i < 4; ++i) div *= 10;
  return fixed_string(div_round_half_even(quanta, div), decimals);
}

std::string Rate::to_ore_string(int decimals) const {
  return format_fixed(nano_ore_per_kwh, kNanoOrePerOre, decimals);
}

Rate Rate::from_ore_per_kwh(double ore) {
  return Rate{static_cast<std::int64_t>(std::llround(ore * static_cast<double>(kNanoOrePerOre)))};
}

Rate Rate::parse_ore_per_kwh(std::string_view text) {
  i128 v = 0;
  if (!parse_scaled(text, 9, v)) throw FormatError("invalid rate: '" + std::string(text) + "'");
  return Rate{static_cast<std::int64_t>(v)};
}

Money charge(Wh energy, Rate rate) {
  i128 product = static_cast<i128>(energy) * rate.nano_ore_per_kwh;
  return Money{static_cast<std::int64_t>(div_round_half_even(product, kChargeDivisor))};
}

bool parse_kwh_exact(std::string_view text, Wh& out) {
  i128 v = 0;
  if (!parse_scaled(text, 3, v)) return false;
  if (v > std::numeric_limits<std::int32_t>::max() || v < std::numeric_limits<std::int32_t>::min())
    return false;
  out = static_cast<Wh>(v);
  return true;
}

std::string format_kwh(Wh energy) { return fixed_string(energy, 3); }

Fraction::Fraction(std::int64_t n, std::int64_t d) { *this = reduce(n, d); }

Fraction Fraction::parse_decimal(std::string_view text) {
  i128 v = 0;
  if (!parse_scaled(text, 12, v)) throw FormatError("invalid decimal: '" + std::string(text) + "'");
  return reduce(v, static_cast<i128>(1'000'000'000'000LL));
}

Fraction Fraction::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  i128 n = 0;
  i128 d = 0;
  if (!parse_scaled(text.substr(0, slash), 0, n) || !parse_scaled(text.substr(slash + 1), 0, d) || d == 0)
    throw FormatError("invalid fraction: '" + std::string(text) + "'");
  return reduce(n, d);
}

Fraction Fraction::from_double(double v) {
  if (!std::isfinite(v)) throw Error("non-finite fraction");
  return reduce(static_cast<i128>(std::llround(v * 1e9)), 1'000'000'000);
}

std::string Fraction::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

std::string Fraction::to_decimal_string(int min_decimals) const {
  i128 scale = 1;
  for (int d = 0; d <= 12; ++d, scale *= 10) {
    if ((static_cast<i128>(num) * scale) % den == 0) return format_fixed(num, den, std::max(d, min_decimals));
  }
  return to_string();
}

std::string format_fixed(i128 num, i128 den, int decimals) {
  i128 scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  return fixed_string(div_round_half_even(num * scale, den), decimals);
}

Fraction operator+(const Fraction& a, const Fraction& b) {
  return reduce(static_cast<i128>(a.num) * b.den + static_cast<i128>(b.num) * a.den,
                static_cast<i128>(a.den) * b.den);
}

Fraction operator-(const Fraction& a, const Fraction& b) {
  return reduce(static_cast<i128>(a.num) * b.den - static_cast<i128>(b.num) * a.den,
                static_cast<i128>(a.den) * b.den);
}

Fraction operator*(const Fraction& a, const Fraction& b) {
  return reduce(static_cast<i128>(a.num) * b.num, static_cast<i128>(a.den) * b.den);
}

Fraction operator/(const Fraction& a, const Fraction& b) {
  if (b.num == 0) throw Error("fraction division by zero");
  return reduce(static_cast<i128>(a.num) * b.den, static_cast<i128>(a.den) * b.num);
}

}  // namespace tariffsim
