#pragma once

#include <cstdint>
#include <vector>

#include "tariffsim/money.hpp"

namespace tariffsim {

/// Slot-wise sum of cleaned household energy, in Wh.
struct SystemLoad {
  std::vector<Wh> energy;
  int hours() const { return static_cast<int>(energy.size()); }
};

/// The floor(fraction * H) highest-load hours, sorted ascending.
struct PeakWindow {
  int year_hours = 0;
  std::vector<int> hours;
  /// mask[h] == 1 iff hour h is in the window.
  std::vector<std::uint8_t> mask;

  static PeakWindow from_hours(int year_hours, std::vector<int> hours);
  bool contains(int hour) const { return mask[static_cast<std::size_t>(hour)] != 0; }
  std::size_t size() const { return hours.size(); }
};

}  // namespace tariffsim
