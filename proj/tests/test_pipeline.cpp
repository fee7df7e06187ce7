#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tariffsim/errors.hpp"
#include "tariffsim/pipeline.hpp"

using namespace tariffsim;

TEST_SUITE("pipeline") {

TEST_CASE("streaming pipeline matches the naive oracle") {
  std::mt19937_64 rng(2024);
  const int H = 24;
  const int threshold = 6;
  int compared = 0, empty = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const oracle::Instance in = oracle::random_instance(rng, H, threshold);
    PipelineOptions opts;
    opts.rebuild_threshold = threshold;
    opts.peak_fractions = {Fraction(1, 4)};
    const auto want = oracle::run(in, H / 4, threshold);
    const MemorySource src(in.profiles, in.keys);
    if (!want) {
      CHECK_THROWS_AS(run_pipeline(src, default_rule_table(), opts), EmptyGroup);
      ++empty;
      continue;
    }
    const PipelineResult got = run_pipeline(src, default_rule_table(), opts);
    CHECK(got.load.energy == want->load);
    CHECK(got.windows[0].hours == want->window);
    CHECK(got.q_total == want->q_total);
    CHECK(got.q_peak == want->q_peak);
    ++compared;
  }
  CHECK(compared > 100);
}

TEST_CASE("streaming pipeline agrees with batch cleaning") {
  PopulationSpec spec = default_population_spec();
  spec.households = 1500;
  spec.fault_fraction = 0.2;
  spec.year_hours = 24 * 60;
  spec.max_fault_run = 1200;
  const SyntheticSource src(spec, default_rule_table());
  const auto& pop = src.population();
  auto profiles = generate_profiles(pop, src.shapes(), spec);
  const auto attrs = index_attributes(pop.records);
  const CleaningResult batch = clean_profiles(profiles, attrs, default_rule_table());
  PipelineOptions opts;
  const PipelineResult streamed = run_pipeline(src, default_rule_table(), opts);
  CHECK(streamed.filled == batch.filled);
  CHECK(streamed.rebuilt == batch.rebuilt);
  CHECK(batch.rebuilt > 0);
  CHECK(streamed.load.energy == system_load(batch.profiles).energy);
  for (std::size_t i = 0; i < batch.profiles.size(); ++i) CHECK(streamed.q_total[i] == batch.profiles[i].total());
  const auto agg = aggregate_annual(batch.profiles, batch.keys, streamed.windows[0]);
  Wh peak = 0;
  for (const auto& g : agg) peak += g.q_peak;
  CHECK(peak == streamed.total_peak(0));
}

TEST_CASE("output is independent of the thread count") {
  PopulationSpec spec = default_population_spec();
  spec.households = 5000;
  spec.fault_fraction = 0.05;
  const SyntheticSource src(spec, default_rule_table());
  PipelineOptions opts;
  opts.peak_fractions = {Fraction(1, 20), Fraction(1, 10)};
  opts.threads = 1;
  const PipelineResult one = run_pipeline(src, default_rule_table(), opts);
  for (unsigned t : {4u, 8u}) {
    opts.threads = t;
    const PipelineResult many = run_pipeline(src, default_rule_table(), opts);
    CHECK(many.load.energy == one.load.energy);
    CHECK(many.q_total == one.q_total);
    CHECK(many.q_peak == one.q_peak);
    CHECK(many.census == one.census);
    CHECK(many.filled == one.filled);
  }
  CHECK(one.windows.size() == 2);
  CHECK(one.windows[0].size() == 438);
  CHECK(one.windows[1].size() == 876);
}

TEST_CASE("ingest joins attributes and reports exclusions") {
  std::vector<HourlyProfile> ps;
  for (const char* id : {"a", "b", "c"}) {
    HourlyProfile p(id, 4);
    std::fill(p.energy.begin(), p.energy.end(), 10);
    ps.push_back(p);
  }
  HouseholdAttributes ok;
  HouseholdAttributes bad;
  bad.occupancy = Occupancy::P3plus;
  bad.heat_pump = true;
  AttributeIndex attrs{{"a", ok}, {"b", bad}, {"d", ok}};
  const IngestResult r = ingest(ps, attrs, default_rule_table(), false);
  CHECK(r.source->size() == 1);
  CHECK(r.exclusions.size() == 3);  // b unmapped, c without attributes, d without metering
  CHECK_THROWS_AS(ingest(ps, attrs, default_rule_table(), true), UnmappedCombination);
}

}
