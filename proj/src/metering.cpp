#include "tariffsim/metering.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>

namespace tariffsim {

namespace {

// A band label, or a raw floor area in square metres.
AreaBand area_field(Dwelling dwelling, std::string_view s) {
  if (!s.empty() && (std::isdigit(static_cast<unsigned char>(s.front())) || s.front() == '.')) {
    double m2 = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), m2);
    if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("bad floor area '" + std::string(s) + "'");
    return band_floor_area(dwelling, m2);
  }
  return parse_area_band(s);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits on commas without allocating. Returns the number of fields found.
template <std::size_t N>
std::size_t split_fields(std::string_view line, std::array<std::string_view, N>& fields) {
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                                : comma - start);
    if (n < N) fields[n] = trim(field);
    ++n;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return n;
}

bool parse_int(std::string_view s, long long& out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_flag(std::string_view s, bool& out) {
  if (s == "0") { out = false; return true; }
  if (s == "1") { out = true; return true; }
  return false;
}

}  // namespace

HourlyProfile::HourlyProfile(std::string id, int hours)
    : household_id(std::move(id)),
      energy(static_cast<std::size_t>(hours), 0),
      faulty(static_cast<std::size_t>(hours), 0) {}

int HourlyProfile::faulty_count() const {
  return static_cast<int>(std::count(faulty.begin(), faulty.end(), std::uint8_t{1}));
}

Wh HourlyProfile::total() const {
  Wh sum = 0;
  for (std::size_t h = 0; h < energy.size(); ++h)
    if (!faulty[h]) sum += energy[h];
  return sum;
}

MeteringData parse_metering(std::istream& in, int year_hours) {
  if (year_hours <= 0) throw FormatError("year length must be positive");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("metering stream is empty");
  if (trim(line) != "household_id,hour,kwh")
    throw FormatError("unexpected metering header '" + std::string(trim(line)) +
                      "', expected 'household_id,hour,kwh'");

  struct Pending {
    HourlyProfile profile;
    std::vector<std::uint8_t> seen;
  };
  std::map<std::string, Pending, std::less<>> by_id;
  MeteringData data;
  std::size_t line_no = 1;
  std::array<std::string_view, 3> f;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    const std::size_t n = split_fields(row, f);
    if (n != 3) {
      data.issues.push_back({line_no, "", "expected 3 fields, found " + std::to_string(n)});
      continue;
    }
    if (f[0].empty()) {
      data.issues.push_back({line_no, "", "empty household_id"});
      continue;
    }
    long long hour = 0;
    if (!parse_int(f[1], hour) || hour < 0 || hour >= year_hours) {
      data.issues.push_back({line_no, std::string(f[0]), "hour '" + std::string(f[1]) + "' out of range"});
      continue;
    }
    auto it = by_id.find(f[0]);
    if (it == by_id.end()) {
      Pending p{HourlyProfile(std::string(f[0]), year_hours),
                std::vector<std::uint8_t>(static_cast<std::size_t>(year_hours), 0)};
      std::fill(p.profile.faulty.begin(), p.profile.faulty.end(), std::uint8_t{1});
      it = by_id.emplace(std::string(f[0]), std::move(p)).first;
    }
    Pending& p = it->second;
    const auto slot = static_cast<std::size_t>(hour);
    if (p.seen[slot]) {
      data.issues.push_back({line_no, p.profile.household_id,
                             "duplicate reading for hour " + std::to_string(hour) + " ignored"});
      continue;
    }
    p.seen[slot] = 1;
    if (f[2].empty()) {
      data.issues.push_back({line_no, p.profile.household_id,
                             "empty kwh at hour " + std::to_string(hour) + ", slot marked faulty"});
      continue;
    }
    Wh wh = 0;
    if (!parse_kwh_exact(f[2], wh)) {
      data.issues.push_back({line_no, p.profile.household_id,
                             "unparseable kwh '" + std::string(f[2]) + "', slot marked faulty"});
      continue;
    }
    if (wh < 0) {
      data.issues.push_back({line_no, p.profile.household_id,
                             "negative kwh at hour " + std::to_string(hour) + ", slot marked faulty"});
      continue;
    }
    p.profile.energy[slot] = static_cast<std::int32_t>(wh);
    p.profile.faulty[slot] = 0;
  }
  data.profiles.reserve(by_id.size());
  for (auto& [id, p] : by_id) data.profiles.push_back(std::move(p.profile));
  return data;
}

AttributeData parse_attributes(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("attributes stream is empty");
  if (trim(line) != "household_id,dwelling,area_band,occupancy,income_band,hp,ev")
    throw FormatError("unexpected attributes header '" + std::string(trim(line)) + "'");
  AttributeData data;
  std::size_t line_no = 1;
  std::array<std::string_view, 7> f;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    const std::size_t n = split_fields(row, f);
    if (n != 7) {
      data.issues.push_back({line_no, "", "expected 7 fields, found " + std::to_string(n)});
      continue;
    }
    HouseholdRecord rec;
    rec.household_id = std::string(f[0]);
    try {
      rec.attributes.dwelling = parse_dwelling(f[1]);
      rec.attributes.area_band = area_field(rec.attributes.dwelling, f[2]);
      rec.attributes.occupancy = parse_occupancy(f[3]);
      rec.attributes.income_band = parse_income_band(f[4]);
      if (!parse_flag(f[5], rec.attributes.heat_pump) || !parse_flag(f[6], rec.attributes.electric_vehicle))
        throw FormatError("hp/ev must be 0 or 1");
      rec.attributes.validate();
    } catch (const Error& e) {
      data.issues.push_back({line_no, rec.household_id, e.what()});
      continue;
    }
    data.records.push_back(std::move(rec));
  }
  return data;
}

void write_attributes(std::ostream& out, const std::vector<HouseholdRecord>& records) {
  out << "household_id,dwelling,area_band,occupancy,income_band,hp,ev\n";
  for (const auto& r : records) {
    const auto& a = r.attributes;
    out << r.household_id << ',' << to_string(a.dwelling) << ',' << to_string(a.area_band) << ','
        << to_string(a.occupancy) << ',' << to_string(a.income_band) << ',' << (a.heat_pump ? 1 : 0)
        << ',' << (a.electric_vehicle ? 1 : 0) << '\n';
  }
}

void write_metering_header(std::ostream& out) { out << "household_id,hour,kwh\n"; }

void write_metering(std::ostream& out, const HourlyProfile& profile) {
  for (int h = 0; h < profile.hours(); ++h) {
    out << profile.household_id << ',' << h << ',';
    if (!profile.faulty[static_cast<std::size_t>(h)]) out << format_kwh(profile.energy[static_cast<std::size_t>(h)]);
    out << '\n';
  }
}

AttributeIndex index_attributes(const std::vector<HouseholdRecord>& records) {
  AttributeIndex index;
  index.reserve(records.size());
  for (const auto& r : records) index.emplace(r.household_id, r.attributes);
  return index;
}

// --- cleaning ---------------------------------------------------------------

DonorAccumulator::DonorAccumulator(int year_hours) : hours_(year_hours), slots_(kKeySpace) {}

void DonorAccumulator::add(GroupKey key, std::span<const std::int32_t> energy,
                           std::span<const std::uint8_t> faulty) {
  if (static_cast<int>(energy.size()) != hours_) throw MixedYearLength("profile length differs from year length");
  auto& slot = slots_[key.id];
  if (!slot) {
    slot = std::make_unique<Slot>();
    slot->sum.assign(static_cast<std::size_t>(hours_), 0);
    slot->count.assign(static_cast<std::size_t>(hours_), 0);
  }
  for (std::size_t h = 0; h < energy.size(); ++h) {
    if (faulty[h]) continue;
    slot->sum[h] += energy[h];
    slot->count[h] += 1;
  }
}

void DonorAccumulator::merge(const DonorAccumulator& other) {
  if (other.hours_ != hours_) throw MixedYearLength("cannot merge donor sums of different year lengths");
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    const auto& src = other.slots_[k];
    if (!src) continue;
    auto& dst = slots_[k];
    if (!dst) {
      dst = std::make_unique<Slot>(*src);
      continue;
    }
    for (std::size_t h = 0; h < dst->sum.size(); ++h) {
      dst->sum[h] += src->sum[h];
      dst->count[h] += src->count[h];
    }
  }
}

DonorTable::DonorTable(const DonorAccumulator& acc)
    : hours_(acc.hours_), mean_(kKeySpace), has_(kKeySpace) {
  for (std::size_t k = 0; k < acc.slots_.size(); ++k) {
    const auto& slot = acc.slots_[k];
    if (!slot) continue;
    mean_[k].assign(static_cast<std::size_t>(hours_), 0);
    has_[k].assign(static_cast<std::size_t>(hours_), 0);
    for (std::size_t h = 0; h < mean_[k].size(); ++h) {
      if (slot->count[h] == 0) continue;
      has_[k][h] = 1;
      mean_[k][h] = static_cast<std::int32_t>(div_round_half_even(slot->sum[h], slot->count[h]));
    }
  }
}

bool DonorTable::has(GroupKey key, int hour) const {
  const auto& v = has_[key.id];
  return !v.empty() && v[static_cast<std::size_t>(hour)] != 0;
}

std::int32_t DonorTable::mean(GroupKey key, int hour) const {
  return mean_[key.id][static_cast<std::size_t>(hour)];
}

CleaningAction clean_profile(std::span<std::int32_t> energy, std::span<std::uint8_t> faulty,
                             GroupKey key, const DonorTable& donors, int rebuild_threshold) {
  int bad = 0;
  for (std::uint8_t f : faulty) bad += f;
  if (bad == 0) return CleaningAction::Passthrough;
  const bool rebuild = bad > rebuild_threshold;
  for (std::size_t h = 0; h < energy.size(); ++h) {
    if (!rebuild && !faulty[h]) continue;
    const int hour = static_cast<int>(h);
    if (!donors.has(key, hour))
      throw EmptyGroup("group " + key.attributes().to_string() + " has no clean donor at hour " +
                       std::to_string(hour));
    energy[h] = donors.mean(key, hour);
    faulty[h] = 0;
  }
  return rebuild ? CleaningAction::Rebuilt : CleaningAction::Filled;
}

CleaningResult clean_profiles(std::vector<HourlyProfile> profiles, const AttributeIndex& attributes,
                              const ClassificationRuleTable& rules, int rebuild_threshold) {
  CleaningResult result;
  if (profiles.empty()) return result;
  const int hours = profiles.front().hours();
  const GroupLookup lookup(rules);
  for (auto& p : profiles) {
    if (p.hours() != hours) throw MixedYearLength("profile '" + p.household_id + "' has a different year length");
    auto it = attributes.find(p.household_id);
    if (it == attributes.end()) {
      result.exclusions.push_back({p.household_id, "no attributes"});
      continue;
    }
    GroupKey key;
    try {
      key = GroupKey::of(it->second);
    } catch (const Error& e) {
      result.exclusions.push_back({p.household_id, e.what()});
      continue;
    }
    if (!lookup.group(key)) {
      result.exclusions.push_back({p.household_id, "unmapped attribute combination " + it->second.to_string()});
      continue;
    }
    result.keys.push_back(key);
    result.profiles.push_back(std::move(p));
  }

  DonorAccumulator acc(hours);
  for (std::size_t i = 0; i < result.profiles.size(); ++i)
    acc.add(result.keys[i], result.profiles[i].energy, result.profiles[i].faulty);
  const DonorTable donors(acc);

  for (std::size_t i = 0; i < result.profiles.size(); ++i) {
    auto& p = result.profiles[i];
    CleaningAction action;
    try {
      action = clean_profile(p.energy, p.faulty, result.keys[i], donors, rebuild_threshold);
    } catch (const EmptyGroup& e) {
      throw EmptyGroup("household '" + p.household_id + "': " + e.what());
    }
    if (action == CleaningAction::Filled) ++result.filled;
    if (action == CleaningAction::Rebuilt) ++result.rebuilt;
  }
  return result;
}

void write_exclusions(std::ostream& out, const std::vector<Exclusion>& exclusions) {
  out << "household_id,reason\n";
  for (const auto& e : exclusions) {
    std::string reason = e.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    out << e.household_id << ',' << reason << '\n';
  }
}

HourlyProfile category_average_profile(std::span<const HourlyProfile> profiles) {
  if (profiles.empty()) throw EmptyGroup("no profiles to average");
  const int hours = profiles.front().hours();
  HourlyProfile avg("average", hours);
  for (int h = 0; h < hours; ++h) {
    std::int64_t sum = 0;
    std::int64_t count = 0;
    for (const auto& p : profiles) {
      if (p.hours() != hours) throw MixedYearLength("profiles differ in year length");
      const auto slot = static_cast<std::size_t>(h);
      if (p.faulty[slot]) continue;
      sum += p.energy[slot];
      ++count;
    }
    if (count == 0) throw EmptyGroup("no non-faulty contribution at hour " + std::to_string(h));
    avg.energy[static_cast<std::size_t>(h)] = static_cast<std::int32_t>(div_round_half_even(sum, count));
  }
  return avg;
}

SystemLoad system_load(std::span<const HourlyProfile> profiles) {
  SystemLoad load;
  if (profiles.empty()) {
    load.energy.assign(static_cast<std::size_t>(kDefaultYearHours), 0);
    return load;
  }
  const int hours = profiles.front().hours();
  load.energy.assign(static_cast<std::size_t>(hours), 0);
  for (const auto& p : profiles) {
    if (p.hours() != hours) throw MixedYearLength("profile '" + p.household_id + "' has a different year length");
    for (std::size_t h = 0; h < load.energy.size(); ++h)
      if (!p.faulty[h]) load.energy[h] += p.energy[h];
  }
  return load;
}

std::vector<GroupAnnual> aggregate_annual(std::span<const HourlyProfile> profiles,
                                          std::span<const GroupKey> keys, const PeakWindow& window) {
  if (profiles.size() != keys.size()) throw Error("profiles and keys differ in length");
  std::vector<GroupAnnual> by_key(kKeySpace);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    if (p.hours() != window.year_hours) throw MixedYearLength("profile length does not match the peak window");
    auto& g = by_key[keys[i].id];
    g.group = keys[i];
    g.households += 1;
    for (std::size_t h = 0; h < p.energy.size(); ++h) {
      if (p.faulty[h]) continue;
      if (window.mask[h]) g.q_peak += p.energy[h];
      else g.q_base += p.energy[h];
    }
  }
  std::vector<GroupAnnual> out;
  for (const auto& g : by_key)
    if (g.households > 0) out.push_back(g);
  return out;
}

std::vector<GroupAnnual> aggregate_annual(std::span<const HourlyProfile> profiles,
                                          const PeakWindow& window, const AttributeIndex& attributes,
                                          const ClassificationRuleTable& rules) {
  std::vector<GroupKey> keys;
  keys.reserve(profiles.size());
  for (const auto& p : profiles) {
    auto it = attributes.find(p.household_id);
    if (it == attributes.end()) throw Error("no attributes for household '" + p.household_id + "'");
    classify_financial_status(it->second, rules);
    keys.push_back(GroupKey::of(it->second));
  }
  return aggregate_annual(profiles, keys, window);
}

}  // namespace tariffsim
