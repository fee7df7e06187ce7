#pragma once

// Streaming ingest -> clean -> aggregate over any profile source.
//
// The population is walked three times (donor sums, cleaned system load,
// per-household peak splits) so memory stays O(households + hours) even
// when the profiles themselves never fit in RAM.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tariffsim/domain.hpp"
#include "tariffsim/load.hpp"
#include "tariffsim/metering.hpp"
#include "tariffsim/redistribution.hpp"
#include "tariffsim/synthpop.hpp"

namespace tariffsim {

/// Random-access, thread-safe provider of raw (uncleaned) profiles.
class ProfileSource {
 public:
  virtual ~ProfileSource() = default;
  virtual std::size_t size() const = 0;
  virtual int year_hours() const = 0;
  virtual std::string id(std::size_t i) const = 0;
  virtual GroupKey key(std::size_t i) const = 0;
  virtual void fill(std::size_t i, std::span<std::int32_t> energy, std::span<std::uint8_t> faulty) const = 0;
};

/// Profiles already in memory, restricted to classifiable households.
class MemorySource final : public ProfileSource {
 public:
  MemorySource(std::vector<HourlyProfile> profiles, std::vector<GroupKey> keys);
  std::size_t size() const override { return profiles_.size(); }
  int year_hours() const override { return hours_; }
  std::string id(std::size_t i) const override { return profiles_[i].household_id; }
  GroupKey key(std::size_t i) const override { return keys_[i]; }
  void fill(std::size_t i, std::span<std::int32_t> energy, std::span<std::uint8_t> faulty) const override;
  const std::vector<HourlyProfile>& profiles() const { return profiles_; }

 private:
  std::vector<HourlyProfile> profiles_;
  std::vector<GroupKey> keys_;
  int hours_ = kDefaultYearHours;
};

/// Regenerates synthetic profiles on demand.
class SyntheticSource final : public ProfileSource {
 public:
  SyntheticSource(PopulationSpec spec, const ClassificationRuleTable& rules);
  std::size_t size() const override { return pop_.records.size(); }
  int year_hours() const override { return spec_.year_hours; }
  std::string id(std::size_t i) const override { return pop_.records[i].household_id; }
  GroupKey key(std::size_t i) const override { return pop_.keys[i]; }
  void fill(std::size_t i, std::span<std::int32_t> energy, std::span<std::uint8_t> faulty) const override;

  const SyntheticPopulation& population() const { return pop_; }
  const PopulationSpec& spec() const { return spec_; }
  const ShapeLibrary& shapes() const { return shapes_; }

 private:
  PopulationSpec spec_;
  SyntheticPopulation pop_;
  ShapeLibrary shapes_;
};

struct IngestResult {
  std::unique_ptr<MemorySource> source;
  std::vector<Exclusion> exclusions;
  std::vector<ParseIssue> issues;
};

/// Joins metering with attributes and keeps the classifiable households.
/// In strict mode an unmapped combination throws UnmappedCombination.
IngestResult ingest_files(const std::string& attributes_path, const std::string& metering_path,
                          const ClassificationRuleTable& rules, bool strict, int year_hours = kDefaultYearHours);
IngestResult ingest(std::vector<HourlyProfile> profiles, const AttributeIndex& attributes,
                    const ClassificationRuleTable& rules, bool strict);

struct PipelineOptions {
  unsigned threads = 1;
  int rebuild_threshold = kRebuildThreshold;
  /// One peak window is detected per distinct fraction.
  std::vector<Fraction> peak_fractions{Fraction(1, 20)};
};

/// Cleaned annual energy per household and the system-level aggregates.
struct PipelineResult {
  int year_hours = 0;
  SystemLoad load;
  std::vector<Fraction> peak_fractions;
  std::vector<PeakWindow> windows;            // parallel to peak_fractions
  std::vector<std::uint8_t> group;            // StatusTechGroup::index() per household
  std::vector<Wh> q_total;                    // per household
  std::vector<Wh> q_peak;                     // household-major, one per window
  GroupCensus census{};
  std::size_t filled = 0;
  std::size_t rebuilt = 0;

  std::size_t households() const { return q_total.size(); }
  Wh peak(std::size_t household, std::size_t window) const {
    return q_peak[household * windows.size() + window];
  }
  Wh total_consumption() const;
  Wh total_peak(std::size_t window) const;
  std::size_t window_index(const Fraction& fraction) const;
};

PipelineResult run_pipeline(const ProfileSource& source, const ClassificationRuleTable& rules,
                            const PipelineOptions& options);

/// 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested);

}  // namespace tariffsim
