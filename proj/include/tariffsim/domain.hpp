#pragma once

// Household attributes, the dense group-key space and the rule table that
// maps attribute tuples onto the eight financial-status x technology groups.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tariffsim/errors.hpp"

namespace tariffsim {

enum class Dwelling : std::uint8_t { House, Apartment };
enum class AreaBand : std::uint8_t { A1, A2, A3 };
enum class Occupancy : std::uint8_t { P1, P2, P3plus, P5plus };
enum class IncomeBand : std::uint8_t { E1, E2, E3 };
enum class Tech : std::uint8_t { NoTech, HP, EV };
enum class Status : std::uint8_t { Low, Medium, High };

inline constexpr int kDwellingCount = 2;
inline constexpr int kAreaCount = 3;
inline constexpr int kOccupancyCount = 4;
inline constexpr int kIncomeCount = 3;
inline constexpr int kTechCount = 3;
inline constexpr int kStatusCount = 3;
/// Size of the full key space (EV+HP households are not representable).
inline constexpr int kKeySpace = kDwellingCount * kAreaCount * kOccupancyCount * kIncomeCount * kTechCount;

std::string_view to_string(Dwelling v);
std::string_view to_string(AreaBand v);
std::string_view to_string(Occupancy v);
std::string_view to_string(IncomeBand v);
std::string_view to_string(Tech v);
std::string_view to_string(Status v);

Dwelling parse_dwelling(std::string_view s);
AreaBand parse_area_band(std::string_view s);
Occupancy parse_occupancy(std::string_view s);
IncomeBand parse_income_band(std::string_view s);
Tech parse_tech(std::string_view s);
Status parse_status(std::string_view s);

/// Bands a raw floor area. Intervals are half-open, boundaries go up:
/// houses [0,110) [110,146) [146,inf), apartments [0,66) [66,85) [85,inf).
AreaBand band_floor_area(Dwelling dwelling, double square_metres);

struct HouseholdAttributes {
  Dwelling dwelling = Dwelling::House;
  AreaBand area_band = AreaBand::A1;
  Occupancy occupancy = Occupancy::P1;
  IncomeBand income_band = IncomeBand::E1;
  bool heat_pump = false;
  bool electric_vehicle = false;

  /// Throws Error if both heat_pump and electric_vehicle are set.
  void validate() const;
  Tech tech() const;
  std::string to_string() const;

  friend bool operator==(const HouseholdAttributes&, const HouseholdAttributes&) = default;
};

/// Dense id over the six attribute dimensions, in [0, kKeySpace).
struct GroupKey {
  std::uint16_t id = 0;

  static GroupKey of(const HouseholdAttributes& attrs);
  HouseholdAttributes attributes() const;

  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

struct StatusTechGroup {
  Status status = Status::Low;
  Tech tech = Tech::NoTech;

  /// Dense index in [0, 9); Low x EV (index 2) is never populated.
  int index() const { return static_cast<int>(status) * kTechCount + static_cast<int>(tech); }
  static StatusTechGroup from_index(int index);
  std::string label() const;

  friend auto operator<=>(const StatusTechGroup&, const StatusTechGroup&) = default;
};

inline constexpr int kStatusTechSlots = kStatusCount * kTechCount;

/// The eight populated status x technology groups in report order.
const std::array<StatusTechGroup, 8>& populated_groups();

/// A set of allowed values per attribute dimension; an empty set matches all.
struct AttributePattern {
  std::vector<Dwelling> dwelling;
  std::vector<AreaBand> area_band;
  std::vector<Occupancy> occupancy;
  std::vector<IncomeBand> income_band;
  std::vector<Tech> tech;

  bool matches(const HouseholdAttributes& attrs) const;
  bool matches(GroupKey key) const { return matches(key.attributes()); }
};

struct ClassificationRule {
  std::string label;
  AttributePattern pattern;
  StatusTechGroup group;
};

struct ClassificationRuleTable {
  std::string provenance;
  /// Union defining the admitted key space; empty means every key.
  std::vector<AttributePattern> admitted;
  /// Keys removed from the admitted space.
  std::vector<AttributePattern> excluded;
  std::vector<ClassificationRule> rules;

  bool is_admitted(GroupKey key) const;
  /// Admitted keys in ascending id order.
  std::vector<GroupKey> admitted_keys() const;
  /// Index of the first rule matching `key`, if any.
  std::optional<std::size_t> find_rule(GroupKey key) const;
};

class UnmappedCombination : public Error {
 public:
  explicit UnmappedCombination(const HouseholdAttributes& attrs);
  const HouseholdAttributes& attributes() const { return attrs_; }

 private:
  HouseholdAttributes attrs_;
};

StatusTechGroup classify_financial_status(const HouseholdAttributes& attrs,
                                          const ClassificationRuleTable& rules);

struct GroupEntry {
  GroupKey key;
  StatusTechGroup group;
  std::size_t rule_index = 0;
};

std::vector<GroupEntry> enumerate_groups(const ClassificationRuleTable& rules);

struct ValidationIssue {
  enum class Kind { Overlap, Gap, Unreachable };
  Kind kind;
  std::optional<GroupKey> key;
  std::vector<std::size_t> rules;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::size_t count(ValidationIssue::Kind kind) const;
};

ValidationReport validate_rule_table(const ClassificationRuleTable& rules);

/// Precomputed key -> group table for hot loops. Unmapped keys yield nullopt.
class GroupLookup {
 public:
  explicit GroupLookup(const ClassificationRuleTable& rules);
  std::optional<StatusTechGroup> group(GroupKey key) const;
  std::optional<std::size_t> rule(GroupKey key) const;

 private:
  std::array<std::int16_t, kKeySpace> rule_{};
  std::array<std::int8_t, kKeySpace> group_{};
};

// Rule table persistence (JSON).
ClassificationRuleTable load_rule_table(const std::string& path);
ClassificationRuleTable parse_rule_table(std::string_view json_text);
std::string rule_table_to_json(const ClassificationRuleTable& rules);
/// The shipped table encoding the Danish study's grouping.
const ClassificationRuleTable& default_rule_table();

}  // namespace tariffsim
