#pragma once

// Naive reference implementations shared by the unit and acceptance tests.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "tariffsim/domain.hpp"
#include "tariffsim/metering.hpp"
#include "tariffsim/money.hpp"

namespace oracle {

using tariffsim::GroupKey;
using tariffsim::HourlyProfile;
using tariffsim::Wh;

inline std::int64_t half_even(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  std::int64_t r = num % den;
  if (r < 0) {
    q -= 1;
    r += den;
  }
  if (2 * r > den || (2 * r == den && q % 2 != 0)) q += 1;
  return q;
}

// Max-sum subset of size k; among those, the one with the smallest hour sum.
inline std::vector<int> peak_window(const std::vector<Wh>& load, int k) {
  const int H = static_cast<int>(load.size());
  std::vector<int> best;
  Wh best_sum = -1;
  int best_hours = 0;
  for (std::uint32_t mask = 0; mask < (1u << H); ++mask) {
    if (std::popcount(mask) != k) continue;
    Wh sum = 0;
    int hours = 0;
    for (int h = 0; h < H; ++h)
      if (mask >> h & 1u) {
        sum += load[h];
        hours += h;
      }
    if (sum > best_sum || (sum == best_sum && hours < best_hours)) {
      best_sum = sum;
      best_hours = hours;
      best.clear();
      for (int h = 0; h < H; ++h)
        if (mask >> h & 1u) best.push_back(h);
    }
  }
  return best;
}

struct Instance {
  std::vector<HourlyProfile> profiles;
  std::vector<GroupKey> keys;
};

struct Outcome {
  std::vector<Wh> load;
  std::vector<int> window;
  std::vector<Wh> q_total;
  std::vector<Wh> q_peak;
};

// Up to 10 households over H hours drawn from a handful of admitted keys,
// with sparse faults and occasional wholesale rebuilds.
inline Instance random_instance(std::mt19937_64& rng, int H, int rebuild_threshold) {
  const auto keys = tariffsim::default_rule_table().admitted_keys();
  Instance in;
  const int n = 1 + static_cast<int>(rng() % 10);
  const int distinct = 1 + static_cast<int>(rng() % 3);
  std::vector<GroupKey> pool;
  for (int i = 0; i < distinct; ++i) pool.push_back(keys[rng() % keys.size()]);
  for (int i = 0; i < n; ++i) {
    HourlyProfile p("h" + std::to_string(i), H);
    for (auto& e : p.energy) e = static_cast<std::int32_t>(rng() % 4000);
    const int mode = static_cast<int>(rng() % 4);
    if (mode == 1) {
      p.faulty[rng() % H] = 1;
    } else if (mode == 2) {
      for (int k = 0; k < rebuild_threshold + 1; ++k) p.faulty[rng() % H] = 1;
    }
    for (int h = 0; h < H; ++h)
      if (p.faulty[h]) p.energy[h] = 0;
    in.profiles.push_back(std::move(p));
    in.keys.push_back(pool[rng() % pool.size()]);
  }
  return in;
}

// nullopt when a household needs a donor value that does not exist.
inline std::optional<Outcome> run(const Instance& in, int k, int rebuild_threshold) {
  const int H = in.profiles.front().hours();
  const std::size_t n = in.profiles.size();
  std::vector<std::vector<std::int32_t>> clean(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = in.profiles[i];
    int bad = 0;
    for (auto f : p.faulty) bad += f;
    clean[i] = p.energy;
    for (int h = 0; h < H; ++h) {
      if (bad == 0) break;
      if (bad <= rebuild_threshold && !p.faulty[h]) continue;
      std::int64_t sum = 0, count = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (in.keys[j] == in.keys[i] && !in.profiles[j].faulty[h]) {
          sum += in.profiles[j].energy[h];
          ++count;
        }
      if (count == 0) return std::nullopt;
      clean[i][h] = static_cast<std::int32_t>(half_even(sum, count));
    }
  }
  Outcome out;
  out.load.assign(H, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (int h = 0; h < H; ++h) out.load[h] += clean[i][h];
  out.window = peak_window(out.load, k);
  for (std::size_t i = 0; i < n; ++i) {
    Wh total = 0, peak = 0;
    for (int h = 0; h < H; ++h) {
      total += clean[i][h];
      if (std::find(out.window.begin(), out.window.end(), h) != out.window.end()) peak += clean[i][h];
    }
    out.q_total.push_back(total);
    out.q_peak.push_back(peak);
  }
  return out;
}

}  // namespace oracle
