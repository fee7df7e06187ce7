#pragma once

// Hourly metering ingest, the faulty-slot cleaning rule and per-group
// annual energy aggregation.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tariffsim/domain.hpp"
#include "tariffsim/load.hpp"
#include "tariffsim/money.hpp"

namespace tariffsim {

inline constexpr int kDefaultYearHours = 8760;
/// Profiles with more faulty slots than this are rebuilt wholesale.
inline constexpr int kRebuildThreshold = 1000;

struct HourlyProfile {
  std::string household_id;
  std::vector<std::int32_t> energy;   // Wh per hour; 0 on faulty slots
  std::vector<std::uint8_t> faulty;   // 1 = faulty

  HourlyProfile() = default;
  HourlyProfile(std::string id, int hours);

  int hours() const { return static_cast<int>(energy.size()); }
  int faulty_count() const;
  Wh total() const;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string household_id;
  std::string message;
};

struct MeteringData {
  std::vector<HourlyProfile> profiles;  // sorted by household_id
  std::vector<ParseIssue> issues;
};

/// Reads `household_id,hour,kwh` rows. Throws FormatError only for an
/// unreadable header; row problems become issues. Missing slots, empty kWh
/// fields and negative values are marked faulty.
MeteringData parse_metering(std::istream& in, int year_hours = kDefaultYearHours);

struct HouseholdRecord {
  std::string household_id;
  HouseholdAttributes attributes;
};

struct AttributeData {
  std::vector<HouseholdRecord> records;
  std::vector<ParseIssue> issues;
};

/// Reads `household_id,dwelling,area_band,occupancy,income_band,hp,ev`.
AttributeData parse_attributes(std::istream& in);
void write_attributes(std::ostream& out, const std::vector<HouseholdRecord>& records);
/// Writes one row per slot; faulty slots get an empty kWh field.
void write_metering(std::ostream& out, const HourlyProfile& profile);
void write_metering_header(std::ostream& out);

using AttributeIndex = std::unordered_map<std::string, HouseholdAttributes>;
AttributeIndex index_attributes(const std::vector<HouseholdRecord>& records);

// --- cleaning ---------------------------------------------------------------

/// Per-key, per-hour sums over non-faulty donor slots.
class DonorAccumulator {
 public:
  explicit DonorAccumulator(int year_hours);
  void add(GroupKey key, std::span<const std::int32_t> energy, std::span<const std::uint8_t> faulty);
  void merge(const DonorAccumulator& other);
  int year_hours() const { return hours_; }

 private:
  friend class DonorTable;
  struct Slot {
    std::vector<std::int64_t> sum;
    std::vector<std::int32_t> count;
  };
  int hours_;
  std::vector<std::unique_ptr<Slot>> slots_;
};

/// Rounded per-hour donor means for each group key.
class DonorTable {
 public:
  DonorTable() = default;
  explicit DonorTable(const DonorAccumulator& acc);
  /// True if `key` has at least one donor at `hour`.
  bool has(GroupKey key, int hour) const;
  std::int32_t mean(GroupKey key, int hour) const;

 private:
  int hours_ = 0;
  std::vector<std::vector<std::int32_t>> mean_;
  std::vector<std::vector<std::uint8_t>> has_;
};

enum class CleaningAction { Passthrough, Filled, Rebuilt };

/// Cleans one profile in place using precomputed donor means. Throws
/// EmptyGroup if a slot needs a donor value that does not exist.
CleaningAction clean_profile(std::span<std::int32_t> energy, std::span<std::uint8_t> faulty,
                             GroupKey key, const DonorTable& donors,
                             int rebuild_threshold = kRebuildThreshold);

struct Exclusion {
  std::string household_id;
  std::string reason;
};

struct CleaningResult {
  std::vector<HourlyProfile> profiles;   // cleaned, classifiable households only
  std::vector<GroupKey> keys;            // parallel to profiles
  std::vector<Exclusion> exclusions;
  std::size_t filled = 0;
  std::size_t rebuilt = 0;
};

CleaningResult clean_profiles(std::vector<HourlyProfile> profiles, const AttributeIndex& attributes,
                              const ClassificationRuleTable& rules,
                              int rebuild_threshold = kRebuildThreshold);

void write_exclusions(std::ostream& out, const std::vector<Exclusion>& exclusions);

/// Per-hour mean over non-faulty contributions, rounded half-even.
HourlyProfile category_average_profile(std::span<const HourlyProfile> profiles);

SystemLoad system_load(std::span<const HourlyProfile> profiles);

struct GroupAnnual {
  GroupKey group;
  std::size_t households = 0;
  Wh q_peak = 0;
  Wh q_base = 0;
  Wh total() const { return q_peak + q_base; }
};

/// Per-key annual peak/off-peak energy; keys without households are omitted.
std::vector<GroupAnnual> aggregate_annual(std::span<const HourlyProfile> profiles,
                                          std::span<const GroupKey> keys, const PeakWindow& window);

/// Convenience overload classifying through an attribute index.
std::vector<GroupAnnual> aggregate_annual(std::span<const HourlyProfile> profiles,
                                          const PeakWindow& window, const AttributeIndex& attributes,
                                          const ClassificationRuleTable& rules);

}  // namespace tariffsim
