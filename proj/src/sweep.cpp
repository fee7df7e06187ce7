#include "tariffsim/sweep.hpp"

#include <algorithm>
#include <thread>

#include "tariffsim/errors.hpp"

namespace tariffsim {

namespace {

struct LineSums {
  std::array<Money, kStatusTechSlots> offpeak{};
  std::array<Money, kStatusTechSlots> peak{};
};

// Volumetric lines per group for one rate pair; r only touches subscriptions.
LineSums volumetric_sums(const PipelineResult& e, std::size_t window, Rate base_rate, Rate peak_rate,
                         unsigned threads) {
  const std::size_t n = e.households();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, n / 4096))));
  std::vector<LineSums> partial(threads);
  auto work = [&](unsigned t) {
    const std::size_t b = n * t / threads;
    const std::size_t end = n * (t + 1) / threads;
    auto& s = partial[t];
    for (std::size_t i = b; i < end; ++i) {
      const std::size_t g = e.group[i];
      const Wh qp = e.peak(i, window);
      s.peak[g] += charge(qp, peak_rate);
      s.offpeak[g] += charge(e.q_total[i] - qp, base_rate);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  LineSums out;
  for (const auto& p : partial)
    for (std::size_t g = 0; g < kStatusTechSlots; ++g) {
      out.offpeak[g] += p.offpeak[g];
      out.peak[g] += p.peak[g];
    }
  return out;
}

std::int64_t populated_count(const GroupCensus& census) {
  std::int64_t k = 0;
  for (auto n : census) k += n > 0 ? 1 : 0;
  return k;
}

}  // namespace

void RunConfig::validate() const {
  if (scenarios.empty()) throw ConfigError("scenario list is empty");
  if (factors.empty()) throw ConfigError("factor grid is empty");
  for (const auto& f : factors)
    if (f > Fraction(1, 1)) throw ConfigError("redistribution factor " + f.to_string() + " outside [0, 1]");
  for (const auto& f : report_factors)
    if (std::find(factors.begin(), factors.end(), f) == factors.end())
      throw ConfigError("report factor " + f.to_string() + " is not in the factor grid");
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& s = scenarios[i];
    if (s.id.empty()) throw ConfigError("scenario without id");
    for (std::size_t j = 0; j < i; ++j)
      if (scenarios[j].id == s.id) throw ConfigError("duplicate scenario id '" + s.id + "'");
    if (!s.share_from_base && s.volumetric_share > Fraction(1, 1))
      throw ConfigError("scenario '" + s.id + "': volumetric share outside [0, 1]");
  }
  if (flat_rate.nano_ore_per_kwh <= 0) throw ConfigError("flat rate must be positive");
  if (subscription.quanta <= 0) throw ConfigError("base subscription must be positive");
  if (rebuild_threshold < 0) throw ConfigError("rebuild threshold must be non-negative");
  if (year_hours < 1) throw ConfigError("year length must be positive");
}

std::vector<Fraction> RunConfig::peak_fractions() const {
  std::vector<Fraction> out;
  for (const auto& s : scenarios)
    if (std::find(out.begin(), out.end(), s.peak_fraction) == out.end()) out.push_back(s.peak_fraction);
  return out;
}

BillBreakdown GroupBill::average() const {
  BillBreakdown b;
  b.subscription = tariffsim::average(subscription, households);
  b.offpeak = tariffsim::average(offpeak, households);
  b.peak = tariffsim::average(peak, households);
  b.total = tariffsim::average(total, households);
  b.group = group;
  return b;
}

GroupBill& GroupBill::operator+=(const GroupBill& o) {
  households += o.households;
  subscription += o.subscription;
  offpeak += o.offpeak;
  peak += o.peak;
  total += o.total;
  return *this;
}

std::optional<EquityDelta> SweepResult::delta(const SweepCell& c, StatusTechGroup g) const {
  const GroupBill& b = base_of(g);
  if (b.households == 0 || b.total.quanta <= 0) return std::nullopt;
  return equity_delta(c.of(g).total, b.total);
}

std::size_t SweepResult::factor_index(const Fraction& f) const {
  for (std::size_t k = 0; k < factors.size(); ++k)
    if (factors[k] == f) return k;
  throw Error("factor " + f.to_string() + " not in sweep");
}

SweepResult sweep_population(const PipelineResult& e, const RunConfig& config) {
  config.validate();
  const std::size_t n = e.households();
  if (n == 0) throw ConfigError("population is empty after ingest");
  const unsigned threads = resolve_threads(config.threads);

  SweepResult r;
  r.scenarios = config.scenarios;
  r.factors = config.factors;
  r.report_factors = config.report_factors;
  r.census = e.census;
  r.filled = e.filled;
  r.rebuilt = e.rebuilt;
  r.inputs = BaseCaseInputs{config.flat_rate, config.subscription, static_cast<std::int64_t>(n), e.total_consumption()};
  r.inputs.validate();
  const Money target = r.inputs.total_cost();
  const std::int64_t groups = populated_count(r.census);

  for (std::size_t g = 0; g < kStatusTechSlots; ++g) {
    r.base[g].group = StatusTechGroup::from_index(static_cast<int>(g));
    r.base[g].households = r.census[g];
    r.base[g].subscription = Money{config.subscription.quanta * r.census[g]};
  }
  for (std::size_t i = 0; i < n; ++i) r.base[e.group[i]].offpeak += charge(e.q_total[i], config.flat_rate);
  Money base_sum;
  for (auto& b : r.base) {
    b.total = b.subscription + b.offpeak + b.peak;
    base_sum += b.total;
  }
  r.base_audit = audit_revenue_sum(base_sum, static_cast<std::int64_t>(n), target, groups);
  r.passed = r.base_audit.passed;

  std::vector<SubscriptionMultipliers> multipliers;
  for (const auto& f : r.factors) multipliers.push_back(subscription_vector(RedistributionPolicy{f}, r.census));

  for (std::size_t s = 0; s < r.scenarios.size(); ++s) {
    const TariffScenario& sc = r.scenarios[s];
    const std::size_t w = e.window_index(sc.peak_fraction);
    const Wh q_peak = e.total_peak(w);
    const TouCalibration cal =
        calibrate_tou(r.inputs, sc.recovery_factor, q_peak, r.inputs.total_consumption - q_peak, sc.mode);
    const TariffRates rates = solve_scenario(r.inputs, sc, cal);
    r.calibrations.push_back(cal);
    r.peak_hours.push_back(e.windows[w].hours);
    const LineSums lines = volumetric_sums(e, w, rates.base_eff, rates.peak_eff, threads);

    for (std::size_t k = 0; k < r.factors.size(); ++k) {
      SweepCell c;
      c.scenario = s;
      c.factor = r.factors[k];
      c.rates = rates;
      c.multipliers = multipliers[k];
      Money sum;
      for (std::size_t g = 0; g < kStatusTechSlots; ++g) {
        const auto grp = StatusTechGroup::from_index(static_cast<int>(g));
        GroupBill& b = c.groups[g];
        b.group = grp;
        b.households = r.census[g];
        b.subscription = Money{c.multipliers.payment(grp, rates.fee_exact).quanta * b.households};
        b.offpeak = lines.offpeak[g];
        b.peak = lines.peak[g];
        b.total = b.subscription + b.offpeak + b.peak;
        sum += b.total;
      }
      c.audit = audit_revenue_sum(sum, static_cast<std::int64_t>(n), target, groups);
      if (!c.audit.passed) r.passed = false;
      r.cells.push_back(std::move(c));
    }
  }
  return r;
}

ClassificationRuleTable load_rules(const RunConfig& config) {
  return config.rules_path.empty() ? default_rule_table() : load_rule_table(config.rules_path);
}

PreparedPopulation prepare_population(const RunConfig& config, const ClassificationRuleTable& rules) {
  PreparedPopulation p;
  if (!config.attributes_path.empty() || !config.metering_path.empty()) {
    if (config.attributes_path.empty() || config.metering_path.empty())
      throw ConfigError("file input needs both an attributes and a metering path");
    IngestResult in = ingest_files(config.attributes_path, config.metering_path, rules, config.strict, config.year_hours);
    p.source = std::move(in.source);
    p.exclusions = std::move(in.exclusions);
    p.issues = std::move(in.issues);
    return p;
  }
  PopulationSpec spec = config.synthetic ? *config.synthetic : default_population_spec();
  p.source = std::make_unique<SyntheticSource>(std::move(spec), rules);
  return p;
}

SweepResult run_sweep(const RunConfig& config) {
  config.validate();
  const ClassificationRuleTable rules = load_rules(config);
  PreparedPopulation pop = prepare_population(config, rules);
  PipelineOptions opts;
  opts.threads = config.threads;
  opts.rebuild_threshold = config.rebuild_threshold;
  opts.peak_fractions = config.peak_fractions();
  const PipelineResult energies = run_pipeline(*pop.source, rules, opts);
  SweepResult r = sweep_population(energies, config);
  r.exclusions = pop.exclusions.size();
  return r;
}

std::vector<TariffRates> solve_pinned(const RunConfig& config) {
  config.validate();
  if (!config.pinned_households || !config.pinned_consumption || !config.pinned_peak_share)
    throw ConfigError("solving without a population needs households, total consumption and peak share");
  const BaseCaseInputs inputs{config.flat_rate, config.subscription, *config.pinned_households,
                              *config.pinned_consumption};
  const Fraction& p = *config.pinned_peak_share;
  const Wh q_peak = static_cast<Wh>(div_round_half_even(static_cast<i128>(inputs.total_consumption) * p.num, p.den));
  std::vector<TariffRates> out;
  for (const auto& sc : config.scenarios) {
    const auto cal = calibrate_tou(inputs, sc.recovery_factor, q_peak, inputs.total_consumption - q_peak, sc.mode);
    out.push_back(solve_scenario(inputs, sc, cal));
  }
  return out;
}

}  // namespace tariffsim
