#include "tariffsim/domain.hpp"

#include <algorithm>
#include <sstream>

namespace tariffsim {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& names,
             const char* what) {
  for (const auto& [name, value] : names)
    if (name == s) return value;
  throw FormatError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <typename E>
bool allowed(const std::vector<E>& set, E value) {
  return set.empty() || std::find(set.begin(), set.end(), value) != set.end();
}

}  // namespace

std::string_view to_string(Dwelling v) { return v == Dwelling::House ? "House" : "Apartment"; }

std::string_view to_string(AreaBand v) {
  switch (v) {
    case AreaBand::A1: return "A1";
    case AreaBand::A2: return "A2";
    case AreaBand::A3: return "A3";
  }
  return "?";
}

std::string_view to_string(Occupancy v) {
  switch (v) {
    case Occupancy::P1: return "P1";
    case Occupancy::P2: return "P2";
    case Occupancy::P3plus: return "P3plus";
    case Occupancy::P5plus: return "P5plus";
  }
  return "?";
}

std::string_view to_string(IncomeBand v) {
  switch (v) {
    case IncomeBand::E1: return "E1";
    case IncomeBand::E2: return "E2";
    case IncomeBand::E3: return "E3";
  }
  return "?";
}

std::string_view to_string(Tech v) {
  switch (v) {
    case Tech::NoTech: return "NoTech";
    case Tech::HP: return "HP";
    case Tech::EV: return "EV";
  }
  return "?";
}

std::string_view to_string(Status v) {
  switch (v) {
    case Status::Low: return "Low";
    case Status::Medium: return "Medium";
    case Status::High: return "High";
  }
  return "?";
}

Dwelling parse_dwelling(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, Dwelling>, 4> names{{
      {"House", Dwelling::House}, {"H", Dwelling::House},
      {"Apartment", Dwelling::Apartment}, {"Apt", Dwelling::Apartment}}};
  return parse_enum(s, names, "dwelling");
}

AreaBand parse_area_band(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, AreaBand>, 3> names{{
      {"A1", AreaBand::A1}, {"A2", AreaBand::A2}, {"A3", AreaBand::A3}}};
  return parse_enum(s, names, "area band");
}

Occupancy parse_occupancy(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, Occupancy>, 6> names{{
      {"P1", Occupancy::P1}, {"P2", Occupancy::P2},
      {"P3plus", Occupancy::P3plus}, {"P3+", Occupancy::P3plus},
      {"P5plus", Occupancy::P5plus}, {"P5+", Occupancy::P5plus}}};
  return parse_enum(s, names, "occupancy");
}

IncomeBand parse_income_band(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, IncomeBand>, 3> names{{
      {"E1", IncomeBand::E1}, {"E2", IncomeBand::E2}, {"E3", IncomeBand::E3}}};
  return parse_enum(s, names, "income band");
}

Tech parse_tech(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, Tech>, 3> names{{
      {"NoTech", Tech::NoTech}, {"HP", Tech::HP}, {"EV", Tech::EV}}};
  return parse_enum(s, names, "technology");
}

Status parse_status(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, Status>, 3> names{{
      {"Low", Status::Low}, {"Medium", Status::Medium}, {"High", Status::High}}};
  return parse_enum(s, names, "status");
}

AreaBand band_floor_area(Dwelling dwelling, double square_metres) {
  if (!(square_metres >= 0.0)) throw Error("floor area must be non-negative");
  const double lower = dwelling == Dwelling::House ? 110.0 : 66.0;
  const double upper = dwelling == Dwelling::House ? 146.0 : 85.0;
  if (square_metres < lower) return AreaBand::A1;
  if (square_metres < upper) return AreaBand::A2;
  return AreaBand::A3;
}

void HouseholdAttributes::validate() const {
  if (heat_pump && electric_vehicle)
    throw Error("household owns both a heat pump and an electric vehicle: " + to_string());
}

Tech HouseholdAttributes::tech() const {
  validate();
  if (heat_pump) return Tech::HP;
  if (electric_vehicle) return Tech::EV;
  return Tech::NoTech;
}

std::string HouseholdAttributes::to_string() const {
  std::ostringstream os;
  os << '(' << tariffsim::to_string(dwelling) << ',' << tariffsim::to_string(area_band) << ','
     << tariffsim::to_string(occupancy) << ',' << tariffsim::to_string(income_band)
     << ",hp=" << (heat_pump ? 1 : 0) << ",ev=" << (electric_vehicle ? 1 : 0) << ')';
  return os.str();
}

GroupKey GroupKey::of(const HouseholdAttributes& a) {
  const int tech = static_cast<int>(a.tech());
  int id = static_cast<int>(a.dwelling);
  id = id * kAreaCount + static_cast<int>(a.area_band);
  id = id * kOccupancyCount + static_cast<int>(a.occupancy);
  id = id * kIncomeCount + static_cast<int>(a.income_band);
  id = id * kTechCount + tech;
  return GroupKey{static_cast<std::uint16_t>(id)};
}

HouseholdAttributes GroupKey::attributes() const {
  int v = id;
  HouseholdAttributes a;
  const auto tech = static_cast<Tech>(v % kTechCount);
  v /= kTechCount;
  a.income_band = static_cast<IncomeBand>(v % kIncomeCount);
  v /= kIncomeCount;
  a.occupancy = static_cast<Occupancy>(v % kOccupancyCount);
  v /= kOccupancyCount;
  a.area_band = static_cast<AreaBand>(v % kAreaCount);
  v /= kAreaCount;
  a.dwelling = static_cast<Dwelling>(v);
  a.heat_pump = tech == Tech::HP;
  a.electric_vehicle = tech == Tech::EV;
  return a;
}

StatusTechGroup StatusTechGroup::from_index(int index) {
  return StatusTechGroup{static_cast<Status>(index / kTechCount),
                         static_cast<Tech>(index % kTechCount)};
}

std::string StatusTechGroup::label() const {
  return std::string(to_string(status)) + "/" + std::string(to_string(tech));
}

const std::array<StatusTechGroup, 8>& populated_groups() {
  static const std::array<StatusTechGroup, 8> groups{{
      {Status::Low, Tech::NoTech},    {Status::Low, Tech::HP},
      {Status::Medium, Tech::NoTech}, {Status::Medium, Tech::HP},
      {Status::Medium, Tech::EV},     {Status::High, Tech::NoTech},
      {Status::High, Tech::HP},       {Status::High, Tech::EV}}};
  return groups;
}

bool AttributePattern::matches(const HouseholdAttributes& a) const {
  return allowed(dwelling, a.dwelling) && allowed(area_band, a.area_band) &&
         allowed(occupancy, a.occupancy) && allowed(income_band, a.income_band) &&
         allowed(tech, a.tech());
}

bool ClassificationRuleTable::is_admitted(GroupKey key) const {
  const auto attrs = key.attributes();
  const bool in_admitted =
      admitted.empty() ||
      std::any_of(admitted.begin(), admitted.end(),
                  [&](const AttributePattern& p) { return p.matches(attrs); });
  if (!in_admitted) return false;
  return std::none_of(excluded.begin(), excluded.end(),
                      [&](const AttributePattern& p) { return p.matches(attrs); });
}

std::vector<GroupKey> ClassificationRuleTable::admitted_keys() const {
  std::vector<GroupKey> keys;
  for (int id = 0; id < kKeySpace; ++id) {
    GroupKey key{static_cast<std::uint16_t>(id)};
    if (is_admitted(key)) keys.push_back(key);
  }
  return keys;
}

std::optional<std::size_t> ClassificationRuleTable::find_rule(GroupKey key) const {
  const auto attrs = key.attributes();
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (rules[i].pattern.matches(attrs)) return i;
  return std::nullopt;
}

UnmappedCombination::UnmappedCombination(const HouseholdAttributes& attrs)
    : Error("unmapped attribute combination " + attrs.to_string()), attrs_(attrs) {}

StatusTechGroup classify_financial_status(const HouseholdAttributes& attrs,
                                          const ClassificationRuleTable& rules) {
  const GroupKey key = GroupKey::of(attrs);
  if (!rules.is_admitted(key)) throw UnmappedCombination(attrs);
  const auto rule = rules.find_rule(key);
  if (!rule) throw UnmappedCombination(attrs);
  return rules.rules[*rule].group;
}

std::vector<GroupEntry> enumerate_groups(const ClassificationRuleTable& rules) {
  std::vector<GroupEntry> out;
  for (GroupKey key : rules.admitted_keys()) {
    if (auto rule = rules.find_rule(key)) out.push_back({key, rules.rules[*rule].group, *rule});
  }
  return out;
}

std::size_t ValidationReport::count(ValidationIssue::Kind kind) const {
  return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(), [kind](const ValidationIssue& i) { return i.kind == kind; }));
}

ValidationReport validate_rule_table(const ClassificationRuleTable& table) {
  ValidationReport report;
  std::vector<bool> reached(table.rules.size(), false);
  for (GroupKey key : table.admitted_keys()) {
    const auto attrs = key.attributes();
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < table.rules.size(); ++i)
      if (table.rules[i].pattern.matches(attrs)) hits.push_back(i);
    for (std::size_t i : hits) reached[i] = true;
    if (hits.empty()) {
      report.issues.push_back({ValidationIssue::Kind::Gap, key, {},
                               "no rule covers admitted key " + attrs.to_string()});
    } else if (hits.size() > 1) {
      std::string msg = "rules";
      for (std::size_t i : hits) msg += " '" + table.rules[i].label + "'";
      msg += " overlap on " + attrs.to_string();
      report.issues.push_back({ValidationIssue::Kind::Overlap, key, hits, msg});
    }
  }
  for (std::size_t i = 0; i < table.rules.size(); ++i) {
    if (!reached[i])
      report.issues.push_back({ValidationIssue::Kind::Unreachable, std::nullopt, {i},
                               "rule '" + table.rules[i].label + "' matches no admitted key"});
  }
  return report;
}

GroupLookup::GroupLookup(const ClassificationRuleTable& rules) {
  rule_.fill(-1);
  group_.fill(-1);
  for (const auto& entry : enumerate_groups(rules)) {
    rule_[entry.key.id] = static_cast<std::int16_t>(entry.rule_index);
    group_[entry.key.id] = static_cast<std::int8_t>(entry.group.index());
  }
}

std::optional<StatusTechGroup> GroupLookup::group(GroupKey key) const {
  if (key.id >= kKeySpace || group_[key.id] < 0) return std::nullopt;
  return StatusTechGroup::from_index(group_[key.id]);
}

std::optional<std::size_t> GroupLookup::rule(GroupKey key) const {
  if (key.id >= kKeySpace || rule_[key.id] < 0) return std::nullopt;
  return static_cast<std::size_t>(rule_[key.id]);
}

}  // namespace tariffsim
