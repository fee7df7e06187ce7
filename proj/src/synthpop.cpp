#include "tariffsim/synthpop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tariffsim/errors.hpp"

namespace tariffsim {

namespace embedded {
extern const std::string_view kDefaultPopulation;
}

namespace {

using json = nlohmann::json;
using u128 = unsigned __int128;

constexpr std::uint64_t kShapeScale = std::uint64_t{1} << 32;

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  for (const auto& [k, v] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("unknown field '" + k + "' in " + std::string(where));
  }
}

std::vector<std::uint64_t> quantize_prefix(const std::vector<double>& w) {
  const std::vector<std::int64_t> q = largest_remainder(static_cast<std::int64_t>(kShapeScale), w);
  std::vector<std::uint64_t> prefix(w.size() + 1, 0);
  for (std::size_t h = 0; h < w.size(); ++h) prefix[h + 1] = prefix[h] + static_cast<std::uint64_t>(q[h]);
  return prefix;
}

void normalise(std::vector<double>& w) {
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
}

std::vector<double> mix(const std::vector<double>& a, double wa, const std::vector<double>& b, double wb) {
  std::vector<double> out(a.size());
  for (std::size_t h = 0; h < a.size(); ++h) out[h] = wa * a[h] + wb * b[h];
  return out;
}

}  // namespace

// --- spec -------------------------------------------------------------------

bool PopulationSpec::has_status_totals() const {
  for (int s = 0; s < kStatusCount; ++s)
    if (status_population[static_cast<std::size_t>(s)] > 0.0) return true;
  return false;
}

void PopulationSpec::validate() const {
  if (households < 1) throw ConfigError("population needs at least one household");
  if (year_hours < 1) throw ConfigError("year length must be positive");
  if (!(mean_annual_kwh >= 0.0) || !std::isfinite(mean_annual_kwh))
    throw ConfigError("mean annual kWh must be a non-negative number");
  if (!(jitter_sigma >= 0.0) || jitter_sigma > 3.0) throw ConfigError("jitter sigma must lie in [0, 3]");
  if (!(fault_fraction >= 0.0) || fault_fraction > 1.0) throw ConfigError("fault fraction must lie in [0, 1]");
  if (max_fault_run < 1) throw ConfigError("max fault run must be positive");
  if (categories.empty()) throw ConfigError("population spec lists no categories");
  double pop = 0.0;
  double cons = 0.0;
  for (const auto& c : categories) {
    if (!(c.population >= 0.0) || !(c.consumption >= 0.0))
      throw ConfigError("negative share for category '" + c.label + "'");
    pop += c.population;
    cons += c.consumption;
  }
  // Published tables round each row, so the totals are only near 1.
  if (std::abs(pop - 1.0) > 1e-3) throw ConfigError("population shares do not sum to 1");
  if (std::abs(cons - 1.0) > 1e-3) throw ConfigError("consumption shares do not sum to 1");
  if (has_status_totals()) {
    double sp = 0.0;
    double sc = 0.0;
    for (int s = 0; s < kStatusCount; ++s) {
      sp += status_population[static_cast<std::size_t>(s)];
      sc += status_consumption[static_cast<std::size_t>(s)];
    }
    if (std::abs(sp - 1.0) > 1e-3 || std::abs(sc - 1.0) > 1e-3)
      throw ConfigError("status totals do not sum to 1");
  }
}

PopulationSpec parse_population_spec(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("population spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("population spec must be a JSON object");
  check_keys(j,
             {"households", "seed", "year_hours", "mean_annual_kwh", "jitter_sigma", "fault_fraction",
              "max_fault_run", "strict", "status_totals", "categories"},
             "population spec");
  PopulationSpec s;
  try {
    s.households = j.value("households", s.households);
    s.seed = j.value("seed", s.seed);
    s.year_hours = j.value("year_hours", s.year_hours);
    s.mean_annual_kwh = j.value("mean_annual_kwh", s.mean_annual_kwh);
    s.jitter_sigma = j.value("jitter_sigma", s.jitter_sigma);
    s.fault_fraction = j.value("fault_fraction", s.fault_fraction);
    s.max_fault_run = j.value("max_fault_run", s.max_fault_run);
    s.strict = j.value("strict", s.strict);
    if (j.contains("status_totals")) {
      for (const auto& [name, v] : j.at("status_totals").items()) {
        const auto idx = static_cast<std::size_t>(parse_status(name));
        check_keys(v, {"population", "consumption"}, "status total");
        s.status_population[idx] = v.at("population").get<double>();
        s.status_consumption[idx] = v.at("consumption").get<double>();
      }
    }
    for (const auto& c : j.at("categories")) {
      check_keys(c, {"label", "population", "consumption"}, "category");
      s.categories.push_back(
          {c.at("label").get<std::string>(), c.at("population").get<double>(), c.at("consumption").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad population spec: ") + e.what());
  }
  s.validate();
  return s;
}

PopulationSpec load_population_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open population spec '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_population_spec(ss.str());
}

std::string population_spec_to_json(const PopulationSpec& s) {
  json j;
  j["households"] = s.households;
  j["seed"] = s.seed;
  j["year_hours"] = s.year_hours;
  j["mean_annual_kwh"] = s.mean_annual_kwh;
  j["jitter_sigma"] = s.jitter_sigma;
  j["fault_fraction"] = s.fault_fraction;
  j["max_fault_run"] = s.max_fault_run;
  j["strict"] = s.strict;
  if (s.has_status_totals()) {
    for (int i = 0; i < kStatusCount; ++i)
      j["status_totals"][std::string(to_string(static_cast<Status>(i)))] = {
          {"population", s.status_population[static_cast<std::size_t>(i)]},
          {"consumption", s.status_consumption[static_cast<std::size_t>(i)]}};
  }
  j["categories"] = json::array();
  for (const auto& c : s.categories)
    j["categories"].push_back({{"label", c.label}, {"population", c.population}, {"consumption", c.consumption}});
  return j.dump(2);
}

const PopulationSpec& default_population_spec() {
  static const PopulationSpec spec = parse_population_spec(embedded::kDefaultPopulation);
  return spec;
}

// --- randomness -------------------------------------------------------------

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t index, std::uint64_t purpose) {
  std::uint64_t x = seed;
  std::uint64_t a = splitmix(x);
  x = a ^ (index * 0xD1B54A32D192ED03ULL);
  std::uint64_t b = splitmix(x);
  x = b ^ (purpose * 0x8CB92BA72F3D8DD7ULL);
  state_ = splitmix(x);
}

std::uint64_t CounterRng::next() { return splitmix(state_); }

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t n) {
  if (n == 0) return 0;
  return static_cast<std::uint64_t>((static_cast<u128>(next()) * n) >> 64);
}

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::int64_t> largest_remainder(std::int64_t total, std::span<const double> weights) {
  std::vector<std::int64_t> out(weights.size(), 0);
  if (total < 0) throw ConfigError("cannot apportion a negative total");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("apportionment weights must be non-negative");
    sum += w;
  }
  if (weights.empty() || total == 0) return out;
  if (sum <= 0.0) throw ConfigError("apportionment weights are all zero");

  std::vector<long double> rem(weights.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const long double exact = static_cast<long double>(total) * weights[i] / sum;
    out[i] = static_cast<std::int64_t>(std::floor(exact));
    rem[i] = exact - static_cast<long double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[order[k % order.size()]];
  return out;
}

// --- shapes -----------------------------------------------------------------

ShapeLibrary::ShapeLibrary(int year_hours) : hours_(year_hours) {
  if (year_hours < 1) throw ConfigError("year length must be positive");
  const auto n = static_cast<std::size_t>(year_hours);
  base_.resize(n);
  hp_.resize(n);
  ev_.resize(n);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t h = 0; h < n; ++h) {
    const double hod = static_cast<double>(h % 24);
    // Year phase with the heating maximum in mid-January.
    const double season = std::cos(two_pi * (static_cast<double>(h) / static_cast<double>(n) - 15.0 / 365.0));
    const double morning = std::exp(-std::pow((hod - 7.5) / 1.5, 2.0));
    const double evening = std::exp(-std::pow((hod - 18.5) / 2.0, 2.0));
    base_[h] = (1.0 + 0.3 * morning + 0.5 * evening) * (1.0 + 0.10 * season);
    hp_[h] = std::max(0.05, 0.55 + 0.45 * season) * (1.0 + 0.05 * morning);
    ev_[h] = (hod >= 18.0 && hod < 23.0) ? 1.0 + 0.2 * (22.0 - hod) : 0.0;
  }
  normalise(base_);
  normalise(hp_);
  normalise(ev_);
  prefix_[static_cast<std::size_t>(Tech::NoTech)] = quantize_prefix(base_);
  prefix_[static_cast<std::size_t>(Tech::HP)] = quantize_prefix(mix(base_, 0.4, hp_, 0.6));
  prefix_[static_cast<std::size_t>(Tech::EV)] = quantize_prefix(mix(base_, 0.7, ev_, 0.3));
}

void ShapeLibrary::allocate(Wh annual, Tech tech, std::span<std::int32_t> out) const {
  if (static_cast<int>(out.size()) != hours_) throw MixedYearLength("profile length does not match the shapes");
  if (annual < 0) throw Error("negative annual energy");
  const auto& p = prefix(tech);
  const u128 e = static_cast<u128>(annual);
  std::uint64_t prev = 0;
  for (std::size_t h = 0; h < out.size(); ++h) {
    const auto cur = static_cast<std::uint64_t>((e * p[h + 1]) >> 32);
    out[h] = static_cast<std::int32_t>(cur - prev);
    prev = cur;
  }
}

// --- population -------------------------------------------------------------

std::string household_id(std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "H%07lld", static_cast<long long>(index));
  return buf;
}

SyntheticPopulation generate_population(const PopulationSpec& spec, const ClassificationRuleTable& rules) {
  spec.validate();
  const std::size_t ncat = spec.categories.size();
  if (ncat > 0xFFFF) throw ConfigError("too many categories");

  // Category -> rule, and the admitted keys each rule owns.
  std::vector<std::vector<GroupKey>> keys_of_rule(rules.rules.size());
  for (const GroupEntry& e : enumerate_groups(rules)) keys_of_rule[e.rule_index].push_back(e.key);
  std::vector<std::size_t> rule_of(ncat);
  for (std::size_t c = 0; c < ncat; ++c) {
    const auto& label = spec.categories[c].label;
    auto it = std::find_if(rules.rules.begin(), rules.rules.end(),
                           [&](const ClassificationRule& r) { return r.label == label; });
    if (it == rules.rules.end()) throw ConfigError("category '" + label + "' names no classification rule");
    rule_of[c] = static_cast<std::size_t>(it - rules.rules.begin());
    for (std::size_t d = 0; d < c; ++d)
      if (spec.categories[d].label == label) throw ConfigError("category '" + label + "' listed twice");
  }
  auto status_of = [&](std::size_t c) { return rules.rules[rule_of[c]].group.status; };

  // Two-level apportionment when status totals are given.
  auto apportion = [&](std::int64_t total, auto share_of, const std::array<double, kStatusCount>& status_shares,
                       const std::vector<bool>& enabled) {
    std::vector<std::int64_t> out(ncat, 0);
    std::vector<double> w(ncat);
    if (!spec.has_status_totals()) {
      for (std::size_t c = 0; c < ncat; ++c) w[c] = enabled[c] ? share_of(c) : 0.0;
      return largest_remainder(total, w);
    }
    std::array<double, kStatusCount> sw{};
    for (int s = 0; s < kStatusCount; ++s) {
      bool any = false;
      for (std::size_t c = 0; c < ncat; ++c)
        any = any || (enabled[c] && status_of(c) == static_cast<Status>(s) && share_of(c) > 0.0);
      sw[static_cast<std::size_t>(s)] = any ? status_shares[static_cast<std::size_t>(s)] : 0.0;
    }
    const auto per_status = largest_remainder(total, sw);
    for (int s = 0; s < kStatusCount; ++s) {
      for (std::size_t c = 0; c < ncat; ++c)
        w[c] = (enabled[c] && status_of(c) == static_cast<Status>(s)) ? share_of(c) : 0.0;
      if (per_status[static_cast<std::size_t>(s)] == 0) continue;
      const auto part = largest_remainder(per_status[static_cast<std::size_t>(s)], w);
      for (std::size_t c = 0; c < ncat; ++c) out[c] += part[c];
    }
    return out;
  };

  SyntheticPopulation pop;
  std::vector<bool> all(ncat, true);
  pop.category_counts = apportion(
      spec.households, [&](std::size_t c) { return spec.categories[c].population; }, spec.status_population, all);
  for (std::size_t c = 0; c < ncat; ++c) {
    const auto n = pop.category_counts[c];
    if (n == 0 && spec.categories[c].population > 0.0 && spec.strict)
      throw InfeasibleShares("category '" + spec.categories[c].label + "' rounds to zero households");
    if (n > 0 && keys_of_rule[rule_of[c]].empty())
      throw ConfigError("category '" + spec.categories[c].label + "' has no admitted attribute combination");
  }

  std::vector<bool> populated(ncat);
  for (std::size_t c = 0; c < ncat; ++c) populated[c] = pop.category_counts[c] > 0;
  const auto total_wh = static_cast<std::int64_t>(
      std::llround(spec.mean_annual_kwh * 1000.0 * static_cast<double>(spec.households)));
  bool any_consumption = false;
  for (std::size_t c = 0; c < ncat; ++c) any_consumption = any_consumption || (populated[c] && spec.categories[c].consumption > 0.0);
  const std::vector<std::int64_t> category_wh =
      any_consumption ? apportion(
                            total_wh, [&](std::size_t c) { return spec.categories[c].consumption; },
                            spec.status_consumption, populated)
                      : std::vector<std::int64_t>(ncat, 0);

  const auto n = static_cast<std::size_t>(spec.households);
  pop.records.resize(n);
  pop.keys.resize(n);
  pop.category.resize(n);
  pop.annual.resize(n);
  std::vector<double> weight(n);
  std::size_t i = 0;
  for (std::size_t c = 0; c < ncat; ++c) {
    const auto& keys = keys_of_rule[rule_of[c]];
    const std::size_t begin = i;
    double wsum = 0.0;
    for (std::int64_t k = 0; k < pop.category_counts[c]; ++k, ++i) {
      CounterRng pick(spec.seed, i, 1);
      const GroupKey key = keys[pick.below(keys.size())];
      pop.keys[i] = key;
      pop.category[i] = static_cast<std::uint16_t>(c);
      pop.records[i] = HouseholdRecord{household_id(static_cast<std::int64_t>(i)), key.attributes()};
      CounterRng jitter(spec.seed, i, 2);
      const double sigma = spec.jitter_sigma;
      weight[i] = sigma > 0.0 ? std::exp(sigma * jitter.normal() - 0.5 * sigma * sigma) : 1.0;
      wsum += weight[i];
    }
    for (std::size_t h = begin; h < i; ++h)
      pop.annual[h] = static_cast<Wh>(std::llround(static_cast<double>(category_wh[c]) * weight[h] / wsum));
  }
  // The first household of every key stays clean so cleaning always has a donor.
  pop.fault_exempt.assign(n, 0);
  std::vector<std::uint8_t> seen(kKeySpace, 0);
  for (std::size_t h = 0; h < n; ++h)
    if (!seen[pop.keys[h].id]) {
      seen[pop.keys[h].id] = 1;
      pop.fault_exempt[h] = 1;
    }
  return pop;
}

void generate_profile_into(const SyntheticPopulation& pop, std::size_t index, const ShapeLibrary& shapes,
                           const PopulationSpec& spec, std::span<std::int32_t> energy,
                           std::span<std::uint8_t> faulty) {
  shapes.allocate(pop.annual[index], pop.records[index].attributes.tech(), energy);
  std::fill(faulty.begin(), faulty.end(), std::uint8_t{0});
  if (spec.fault_fraction <= 0.0 || pop.fault_exempt[index]) return;
  CounterRng rng(spec.seed, index, 3);
  if (rng.uniform() >= spec.fault_fraction) return;
  const auto hours = static_cast<std::uint64_t>(energy.size());
  const std::uint64_t start = rng.below(hours);
  const std::uint64_t len = 1 + rng.below(static_cast<std::uint64_t>(spec.max_fault_run));
  const std::uint64_t end = std::min(hours, start + len);
  for (std::uint64_t h = start; h < end; ++h) {
    energy[h] = 0;
    faulty[h] = 1;
  }
}

std::vector<HourlyProfile> generate_profiles(const SyntheticPopulation& pop, const ShapeLibrary& shapes,
                                             const PopulationSpec& spec) {
  std::vector<HourlyProfile> out;
  out.reserve(pop.records.size());
  for (std::size_t i = 0; i < pop.records.size(); ++i) {
    HourlyProfile p(pop.records[i].household_id, shapes.year_hours());
    generate_profile_into(pop, i, shapes, spec, p.energy, p.faulty);
    out.push_back(std::move(p));
  }
  return out;
}

ShareCalibration calibrate_to_shares(std::vector<HourlyProfile>& profiles, std::span<const std::uint16_t> category,
                                     std::span<const double> targets) {
  if (category.size() != profiles.size()) throw Error("category list does not match the profiles");
  const std::size_t ncat = targets.size();
  std::vector<Wh> current(ncat, 0);
  std::vector<std::size_t> members(ncat, 0);
  Wh total = 0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const std::size_t c = category[i];
    if (c >= ncat) throw Error("profile category out of range");
    const Wh e = profiles[i].total();
    current[c] += e;
    ++members[c];
    total += e;
  }
  double tsum = 0.0;
  for (double t : targets) {
    if (!(t >= 0.0)) throw ConfigError("calibration targets must be non-negative");
    tsum += t;
  }
  if (tsum <= 0.0) throw ConfigError("calibration targets are all zero");

  ShareCalibration out;
  out.factors.assign(ncat, 0.0);
  for (std::size_t c = 0; c < ncat; ++c) {
    if (targets[c] <= 0.0) continue;
    if (members[c] == 0 || current[c] == 0)
      throw EmptyCategory("category " + std::to_string(c) + " has a target share but no energy");
    out.factors[c] = (targets[c] / tsum) * static_cast<double>(total) / static_cast<double>(current[c]);
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    auto& p = profiles[i];
    const Wh old_total = p.total();
    if (old_total == 0) continue;
    const auto new_total = static_cast<i128>(std::llround(out.factors[category[i]] * static_cast<double>(old_total)));
    i128 running = 0;
    i128 prev = 0;
    for (std::size_t h = 0; h < p.energy.size(); ++h) {
      if (p.faulty[h]) continue;
      running += p.energy[h];
      const i128 cur = new_total * running / old_total;
      p.energy[h] = static_cast<std::int32_t>(cur - prev);
      prev = cur;
    }
  }
  return out;
}

}  // namespace tariffsim
