#pragma once

// Deterministic synthetic households and hourly load profiles.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tariffsim/domain.hpp"
#include "tariffsim/metering.hpp"
#include "tariffsim/money.hpp"

namespace tariffsim {

struct CategoryShare {
  std::string label;  // a rule label in the classification table
  double population = 0.0;
  double consumption = 0.0;
};

struct PopulationSpec {
  std::int64_t households = 100'000;
  std::uint64_t seed = 2017;
  int year_hours = kDefaultYearHours;
  double mean_annual_kwh = 2825.8;
  double jitter_sigma = 0.35;
  /// Fraction of households given one contiguous run of faulty slots.
  double fault_fraction = 0.0;
  int max_fault_run = 1500;
  bool strict = false;
  /// Optional status-level totals; when present, category shares are
  /// apportioned within each status. Zero entries mean "not given".
  std::array<double, kStatusCount> status_population{};
  std::array<double, kStatusCount> status_consumption{};
  std::vector<CategoryShare> categories;

  bool has_status_totals() const;
  /// Throws ConfigError on malformed values or shares not summing to 1 +- 1e-3.
  void validate() const;
};

PopulationSpec parse_population_spec(std::string_view json_text);
PopulationSpec load_population_spec(const std::string& path);
std::string population_spec_to_json(const PopulationSpec& spec);
/// Built-in defaults embedded at build time.
const PopulationSpec& default_population_spec();

/// Counter-based generator: the stream for (seed, index, purpose) is fixed.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t index, std::uint64_t purpose);
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::uint64_t state_;
};

/// Largest-remainder apportionment of `total` by non-negative weights.
/// Ties go to the lower index.
std::vector<std::int64_t> largest_remainder(std::int64_t total, std::span<const double> weights);

class ShapeLibrary {
 public:
  explicit ShapeLibrary(int year_hours = kDefaultYearHours);

  int year_hours() const { return hours_; }
  /// Normalised weights (sum 1) for each component.
  const std::vector<double>& base() const { return base_; }
  const std::vector<double>& heat_pump() const { return hp_; }
  const std::vector<double>& ev() const { return ev_; }
  /// Integer prefix sums of the per-tech mixture, ending at exactly 2^32.
  const std::vector<std::uint64_t>& prefix(Tech tech) const {
    return prefix_[static_cast<std::size_t>(tech)];
  }
  /// Spreads `annual` Wh over the year; slots sum exactly to `annual`.
  void allocate(Wh annual, Tech tech, std::span<std::int32_t> out) const;

 private:
  int hours_;
  std::vector<double> base_, hp_, ev_;
  std::array<std::vector<std::uint64_t>, kTechCount> prefix_;
};

struct SyntheticPopulation {
  std::vector<HouseholdRecord> records;
  std::vector<GroupKey> keys;
  std::vector<std::uint16_t> category;       // index into spec.categories
  std::vector<std::int64_t> category_counts;
  std::vector<Wh> annual;                    // calibrated annual energy per household
  std::vector<std::uint8_t> fault_exempt;    // 1 for the first household of each key
};

std::string household_id(std::int64_t index);

/// Households, attributes and calibrated annual energies. Throws
/// InfeasibleShares in strict mode when a positive share gets no household.
SyntheticPopulation generate_population(const PopulationSpec& spec, const ClassificationRuleTable& rules);

/// Hourly profile of household `index` including injected faults.
void generate_profile_into(const SyntheticPopulation& pop, std::size_t index, const ShapeLibrary& shapes,
                           const PopulationSpec& spec, std::span<std::int32_t> energy,
                           std::span<std::uint8_t> faulty);
std::vector<HourlyProfile> generate_profiles(const SyntheticPopulation& pop, const ShapeLibrary& shapes,
                                             const PopulationSpec& spec);

struct ShareCalibration {
  std::vector<double> factors;  // per category
};

/// Scales each category uniformly so its share of total energy equals the
/// normalised target; total energy is preserved. Throws EmptyCategory when
/// a positive target has no energy to scale.
ShareCalibration calibrate_to_shares(std::vector<HourlyProfile>& profiles, std::span<const std::uint16_t> category,
                                     std::span<const double> targets);

}  // namespace tariffsim
