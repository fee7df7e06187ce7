#pragma once

// Scenario x redistribution-factor sweeps over a cleaned population.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tariffsim/billing.hpp"
#include "tariffsim/pipeline.hpp"
#include "tariffsim/redistribution.hpp"
#include "tariffsim/synthpop.hpp"
#include "tariffsim/tariff.hpp"

namespace tariffsim {

struct RunConfig {
  std::string rules_path;          // empty: built-in table
  std::string attributes_path;     // ingest from files when both are set
  std::string metering_path;
  std::optional<PopulationSpec> synthetic;

  std::vector<TariffScenario> scenarios = canonical_scenarios();
  std::vector<Fraction> factors = default_factor_grid();
  /// Factors shown in the bill and share tables.
  std::vector<Fraction> report_factors{Fraction(1, 1), Fraction(0, 1)};

  Rate flat_rate = Rate::parse_ore_per_kwh("18.25");
  Money subscription = Money::parse_dkk("428.8");

  /// Population-free inputs for `solve`: all three must be set together.
  std::optional<std::int64_t> pinned_households;
  std::optional<Wh> pinned_consumption;
  std::optional<Fraction> pinned_peak_share;

  int year_hours = kDefaultYearHours;
  int rebuild_threshold = kRebuildThreshold;
  unsigned threads = 0;
  bool strict = false;
  std::string output_dir = "out";

  /// Throws ConfigError on an empty scenario list or factors outside [0, 1].
  void validate() const;
  std::vector<Fraction> peak_fractions() const;
};

/// Reads a run configuration; relative paths resolve against its directory.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(std::string_view json_text, const std::string& base_dir = ".");
std::vector<TariffScenario> parse_scenarios(std::string_view json_text);
std::vector<TariffScenario> load_scenarios(const std::string& path);
std::string run_config_to_json(const RunConfig& config);

/// Sums of bill lines over the households of one status x tech group.
struct GroupBill {
  StatusTechGroup group;
  std::int64_t households = 0;
  Money subscription;
  Money offpeak;
  Money peak;
  Money total;

  /// Component-wise half-even means.
  BillBreakdown average() const;
  GroupBill& operator+=(const GroupBill& o);
};

using GroupBills = std::array<GroupBill, kStatusTechSlots>;

struct SweepCell {
  std::size_t scenario = 0;   // index into SweepResult::scenarios
  Fraction factor;
  TariffRates rates;
  SubscriptionMultipliers multipliers;
  GroupBills groups{};
  AuditResult audit;

  const GroupBill& of(StatusTechGroup g) const { return groups[static_cast<std::size_t>(g.index())]; }
};

struct SweepResult {
  BaseCaseInputs inputs;
  std::vector<TariffScenario> scenarios;
  std::vector<Fraction> factors;
  std::vector<Fraction> report_factors;
  std::vector<TouCalibration> calibrations;   // per scenario
  std::vector<std::vector<int>> peak_hours;   // per scenario
  GroupCensus census{};
  GroupBills base{};
  AuditResult base_audit;
  std::vector<SweepCell> cells;               // scenario-major, factor-minor
  std::size_t exclusions = 0;
  std::size_t filled = 0;
  std::size_t rebuilt = 0;
  bool passed = true;

  const SweepCell& cell(std::size_t scenario, std::size_t factor) const {
    return cells[scenario * factors.size() + factor];
  }
  const GroupBill& base_of(StatusTechGroup g) const { return base[static_cast<std::size_t>(g.index())]; }
  /// Group delta against its own base-case mean; nullopt for empty groups.
  std::optional<EquityDelta> delta(const SweepCell& cell, StatusTechGroup g) const;
  std::size_t factor_index(const Fraction& f) const;
};

/// Bills every household of `energies` in every (scenario, factor) cell.
SweepResult sweep_population(const PipelineResult& energies, const RunConfig& config);

/// Loads the configured population, runs the pipeline and sweeps it.
SweepResult run_sweep(const RunConfig& config);

/// Pipeline for the configured population (file ingest or synthetic).
struct PreparedPopulation {
  std::unique_ptr<ProfileSource> source;
  std::vector<Exclusion> exclusions;
  std::vector<ParseIssue> issues;
};
PreparedPopulation prepare_population(const RunConfig& config, const ClassificationRuleTable& rules);
ClassificationRuleTable load_rules(const RunConfig& config);

/// Rates for each scenario from pinned base-case inputs, without a population.
std::vector<TariffRates> solve_pinned(const RunConfig& config);

}  // namespace tariffsim
