#include "tariffsim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "tariffsim/errors.hpp"
#include "tariffsim/tariff.hpp"

namespace tariffsim {

namespace {

constexpr std::size_t kChunk = 1024;

// Runs body(thread_index, begin, end) over [0, n) in fixed-size chunks.
// Work is claimed dynamically; callers only combine integer accumulators,
// so the outcome does not depend on which thread handled which chunk.
template <typename Body>
void parallel_chunks(std::size_t n, unsigned threads, Body&& body) {
  if (threads <= 1 || n <= kChunk) {
    for (std::size_t b = 0; b < n; b += kChunk) body(0u, b, std::min(n, b + kChunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        while (true) {
          const std::size_t b = next.fetch_add(kChunk);
          if (b >= n) break;
          body(t, b, std::min(n, b + kChunk));
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// --- sources ----------------------------------------------------------------

MemorySource::MemorySource(std::vector<HourlyProfile> profiles, std::vector<GroupKey> keys)
    : profiles_(std::move(profiles)), keys_(std::move(keys)) {
  if (profiles_.size() != keys_.size()) throw Error("profiles and keys differ in length");
  if (!profiles_.empty()) hours_ = profiles_.front().hours();
  for (const auto& p : profiles_)
    if (p.hours() != hours_) throw MixedYearLength("profile '" + p.household_id + "' has a different year length");
}

void MemorySource::fill(std::size_t i, std::span<std::int32_t> energy, std::span<std::uint8_t> faulty) const {
  const auto& p = profiles_[i];
  std::copy(p.energy.begin(), p.energy.end(), energy.begin());
  std::copy(p.faulty.begin(), p.faulty.end(), faulty.begin());
}

SyntheticSource::SyntheticSource(PopulationSpec spec, const ClassificationRuleTable& rules)
    : spec_(std::move(spec)), pop_(generate_population(spec_, rules)), shapes_(spec_.year_hours) {}

void SyntheticSource::fill(std::size_t i, std::span<std::int32_t> energy, std::span<std::uint8_t> faulty) const {
  generate_profile_into(pop_, i, shapes_, spec_, energy, faulty);
}

// --- ingest -----------------------------------------------------------------

IngestResult ingest(std::vector<HourlyProfile> profiles, const AttributeIndex& attributes,
                    const ClassificationRuleTable& rules, bool strict) {
  IngestResult out;
  const GroupLookup lookup(rules);
  std::vector<HourlyProfile> kept;
  std::vector<GroupKey> keys;
  std::set<std::string> metered;
  for (auto& p : profiles) {
    metered.insert(p.household_id);
    auto it = attributes.find(p.household_id);
    if (it == attributes.end()) {
      out.exclusions.push_back({p.household_id, "no attributes"});
      continue;
    }
    const GroupKey key = GroupKey::of(it->second);
    if (!lookup.group(key)) {
      if (strict) throw UnmappedCombination(it->second);
      out.exclusions.push_back({p.household_id, "unmapped attribute combination " + it->second.to_string()});
      continue;
    }
    keys.push_back(key);
    kept.push_back(std::move(p));
  }
  std::vector<std::string> unmetered;
  for (const auto& [id, attrs] : attributes)
    if (!metered.count(id)) unmetered.push_back(id);
  std::sort(unmetered.begin(), unmetered.end());
  for (auto& id : unmetered) out.exclusions.push_back({std::move(id), "no metering data"});
  out.source = std::make_unique<MemorySource>(std::move(kept), std::move(keys));
  return out;
}

IngestResult ingest_files(const std::string& attributes_path, const std::string& metering_path,
                          const ClassificationRuleTable& rules, bool strict, int year_hours) {
  std::ifstream attr_in(attributes_path);
  if (!attr_in) throw ConfigError("cannot open attributes file '" + attributes_path + "'");
  AttributeData attrs = parse_attributes(attr_in);
  std::ifstream meter_in(metering_path);
  if (!meter_in) throw ConfigError("cannot open metering file '" + metering_path + "'");
  MeteringData meter = parse_metering(meter_in, year_hours);

  IngestResult out = ingest(std::move(meter.profiles), index_attributes(attrs.records), rules, strict);
  for (auto& issue : attrs.issues) {
    issue.message = attributes_path + ":" + std::to_string(issue.line) + ": " + issue.message;
    out.issues.push_back(std::move(issue));
  }
  for (auto& issue : meter.issues) {
    issue.message = metering_path + ":" + std::to_string(issue.line) + ": " + issue.message;
    out.issues.push_back(std::move(issue));
  }
  return out;
}

// --- pipeline ---------------------------------------------------------------

Wh PipelineResult::total_consumption() const {
  Wh sum = 0;
  for (Wh q : q_total) sum += q;
  return sum;
}

Wh PipelineResult::total_peak(std::size_t window) const {
  Wh sum = 0;
  for (std::size_t i = 0; i < q_total.size(); ++i) sum += peak(i, window);
  return sum;
}

std::size_t PipelineResult::window_index(const Fraction& fraction) const {
  for (std::size_t w = 0; w < peak_fractions.size(); ++w)
    if (peak_fractions[w] == fraction) return w;
  throw Error("no peak window computed for fraction " + fraction.to_string());
}

PipelineResult run_pipeline(const ProfileSource& source, const ClassificationRuleTable& rules,
                            const PipelineOptions& options) {
  const unsigned threads = resolve_threads(options.threads);
  const std::size_t n = source.size();
  const int hours = source.year_hours();
  const auto hsz = static_cast<std::size_t>(hours);
  const GroupLookup lookup(rules);

  PipelineResult result;
  result.year_hours = hours;
  for (const Fraction& f : options.peak_fractions)
    if (std::find(result.peak_fractions.begin(), result.peak_fractions.end(), f) == result.peak_fractions.end())
      result.peak_fractions.push_back(f);
  if (result.peak_fractions.empty()) throw ConfigError("no peak fraction requested");

  result.group.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = lookup.group(source.key(i));
    if (!g) throw UnmappedCombination(source.key(i).attributes());
    result.group[i] = static_cast<std::uint8_t>(g->index());
    ++result.census[static_cast<std::size_t>(g->index())];
  }

  struct Buffers {
    std::vector<std::int32_t> energy;
    std::vector<std::uint8_t> faulty;
  };
  std::vector<Buffers> buffers(threads);
  for (auto& b : buffers) {
    b.energy.resize(hsz);
    b.faulty.resize(hsz);
  }

  // Pass 1: donor sums over raw, non-faulty slots.
  std::vector<DonorAccumulator> partial;
  for (unsigned t = 0; t < threads; ++t) partial.emplace_back(hours);
  parallel_chunks(n, threads, [&](unsigned t, std::size_t b, std::size_t e) {
    auto& buf = buffers[t];
    for (std::size_t i = b; i < e; ++i) {
      source.fill(i, buf.energy, buf.faulty);
      partial[t].add(source.key(i), buf.energy, buf.faulty);
    }
  });
  DonorAccumulator donor_sums(hours);
  for (const auto& p : partial) donor_sums.merge(p);
  partial.clear();
  const DonorTable donors(donor_sums);

  auto clean = [&](std::size_t i, Buffers& buf) {
    source.fill(i, buf.energy, buf.faulty);
    try {
      return clean_profile(buf.energy, buf.faulty, source.key(i), donors, options.rebuild_threshold);
    } catch (const EmptyGroup& ex) {
      throw EmptyGroup("household '" + source.id(i) + "': " + ex.what());
    }
  };

  // Pass 2: cleaned system load and annual totals.
  result.q_total.assign(n, 0);
  std::vector<std::vector<Wh>> loads(threads, std::vector<Wh>(hsz, 0));
  std::vector<std::size_t> filled(threads, 0);
  std::vector<std::size_t> rebuilt(threads, 0);
  parallel_chunks(n, threads, [&](unsigned t, std::size_t b, std::size_t e) {
    auto& buf = buffers[t];
    auto& load = loads[t];
    for (std::size_t i = b; i < e; ++i) {
      const CleaningAction action = clean(i, buf);
      if (action == CleaningAction::Filled) ++filled[t];
      if (action == CleaningAction::Rebuilt) ++rebuilt[t];
      Wh total = 0;
      for (std::size_t h = 0; h < hsz; ++h) {
        load[h] += buf.energy[h];
        total += buf.energy[h];
      }
      result.q_total[i] = total;
    }
  });
  result.load.energy.assign(hsz, 0);
  for (unsigned t = 0; t < threads; ++t) {
    for (std::size_t h = 0; h < hsz; ++h) result.load.energy[h] += loads[t][h];
    result.filled += filled[t];
    result.rebuilt += rebuilt[t];
  }
  loads.clear();

  for (const Fraction& f : result.peak_fractions) result.windows.push_back(detect_peak_hours(result.load, f));

  // Pass 3: per-household energy inside each window.
  const std::size_t nw = result.windows.size();
  result.q_peak.assign(n * nw, 0);
  parallel_chunks(n, threads, [&](unsigned t, std::size_t b, std::size_t e) {
    auto& buf = buffers[t];
    for (std::size_t i = b; i < e; ++i) {
      clean(i, buf);
      for (std::size_t w = 0; w < nw; ++w) {
        Wh peak = 0;
        for (int h : result.windows[w].hours) peak += buf.energy[static_cast<std::size_t>(h)];
        result.q_peak[i * nw + w] = peak;
      }
    }
  });
  return result;
}

}  // namespace tariffsim
