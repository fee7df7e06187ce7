// tariffsim: synth | validate | solve | sweep | report | audit

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tariffsim/errors.hpp"
#include "tariffsim/metering.hpp"
#include "tariffsim/pipeline.hpp"
#include "tariffsim/report.hpp"
#include "tariffsim/sweep.hpp"
#include "tariffsim/synthpop.hpp"

namespace fs = std::filesystem;
using namespace tariffsim;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kAuditFailure = 2;

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool strict = false;
};

RunConfig load_config(const Globals& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (!g.out.empty()) c.output_dir = g.out;
  if (g.threads) c.threads = *g.threads;
  if (g.strict) c.strict = true;
  if (g.seed) {
    if (!c.synthetic) c.synthetic = default_population_spec();
    c.synthetic->seed = *g.seed;
  }
  c.validate();
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_synth(const Globals& g, const std::string& spec_path, std::optional<std::int64_t> households) {
  PopulationSpec spec = spec_path.empty() ? default_population_spec() : load_population_spec(spec_path);
  if (g.seed) spec.seed = *g.seed;
  if (households) spec.households = *households;
  if (g.strict) spec.strict = true;
  const std::string dir = g.out.empty() ? "synth" : g.out;
  fs::create_directories(dir);

  const auto& rules = default_rule_table();
  const SyntheticPopulation pop = generate_population(spec, rules);
  const ShapeLibrary shapes(spec.year_hours);
  {
    std::ofstream out(fs::path(dir) / "attributes.csv", std::ios::binary);
    write_attributes(out, pop.records);
  }
  {
    std::ofstream out(fs::path(dir) / "metering.csv", std::ios::binary);
    write_metering_header(out);
    HourlyProfile p("", spec.year_hours);
    for (std::size_t i = 0; i < pop.records.size(); ++i) {
      p.household_id = pop.records[i].household_id;
      generate_profile_into(pop, i, shapes, spec, p.energy, p.faulty);
      write_metering(out, p);
    }
  }
  {
    std::ofstream out(fs::path(dir) / "population.json", std::ios::binary);
    out << population_spec_to_json(spec) << '\n';
  }
  std::cout << "wrote " << pop.records.size() << " households to " << dir << "\n";
  return kOk;
}

int cmd_validate(const Globals& g) {
  const RunConfig c = load_config(g);
  const auto rules = load_rules(c);
  int problems = 0;
  const ValidationReport report = validate_rule_table(rules);
  for (const auto& issue : report.issues) {
    std::cout << "rules: " << issue.message << "\n";
    ++problems;
  }
  std::cout << "rules: " << enumerate_groups(rules).size() << " admitted combinations, " << rules.rules.size()
            << " rules\n";
  if (!c.attributes_path.empty() || !c.metering_path.empty()) {
    const PreparedPopulation pop = prepare_population(c, rules);
    for (const auto& issue : pop.issues) {
      std::cout << issue.message << "\n";
      ++problems;
    }
    for (const auto& e : pop.exclusions) std::cout << "excluded " << e.household_id << ": " << e.reason << "\n";
    std::cout << "households: " << pop.source->size() << " classifiable, " << pop.exclusions.size()
              << " excluded\n";
    if (c.strict && !pop.exclusions.empty()) ++problems;
  } else {
    const PopulationSpec spec = c.synthetic ? *c.synthetic : default_population_spec();
    const SyntheticPopulation pop = generate_population(spec, rules);
    std::cout << "synthetic: " << pop.records.size() << " households\n";
  }
  std::cout << (problems == 0 ? "ok\n" : "validation failed\n");
  return problems == 0 ? kOk : kValidationFailure;
}

int cmd_solve(const Globals& g) {
  const RunConfig c = load_config(g);
  std::vector<TariffRates> rates;
  if (c.pinned_households && c.pinned_consumption && c.pinned_peak_share) {
    rates = solve_pinned(c);
  } else {
    const SweepResult r = run_sweep(c);
    for (std::size_t s = 0; s < r.scenarios.size(); ++s) rates.push_back(r.cell(s, 0).rates);
  }
  std::cout << rates_table(rates);
  return kOk;
}

int run_and_write(const Globals& g, bool tables) {
  const RunConfig c = load_config(g);
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult r = run_sweep(c);
  std::vector<std::string> written;
  if (tables) {
    written = write_reports(r, c.output_dir);
  } else {
    fs::create_directories(c.output_dir);
    for (const auto& [name, body] : {std::pair{"summary.json", summary_json(r)}, std::pair{"bills.csv", bill_export_csv(r)}}) {
      const std::string path = (fs::path(c.output_dir) / name).string();
      std::ofstream(path, std::ios::binary) << body;
      written.push_back(path);
    }
  }
  std::size_t failed = r.base_audit.passed ? 0 : 1;
  for (const auto& cell : r.cells) failed += cell.audit.passed ? 0 : 1;
  std::cerr << r.inputs.households << " households, " << r.cells.size() << " cells, " << failed
            << " audit failures, " << seconds_since(t0) << " s\n";
  for (const auto& w : written) std::cout << w << "\n";
  return r.passed ? kOk : kAuditFailure;
}

int cmd_audit(const Globals& g, std::string bills, std::string summary) {
  const std::string dir = g.out.empty() ? "out" : g.out;
  if (bills.empty()) bills = (fs::path(dir) / "bills.csv").string();
  if (summary.empty()) summary = (fs::path(dir) / "summary.json").string();
  std::ifstream bin(bills);
  if (!bin) throw ConfigError("cannot open '" + bills + "'");
  std::ifstream sin(summary);
  if (!sin) throw ConfigError("cannot open '" + summary + "'");
  const ExportAudit a = audit_bill_export(bin, sin);
  for (const auto& p : a.problems) std::cout << p << "\n";
  for (const auto& c : a.cells)
    std::cout << c.scenario << " r=" << c.factor << " residual " << c.residual.to_dkk_string(2) << " DKK "
              << (c.passed ? "ok" : "FAILED") << "\n";
  std::cout << (a.passed() ? "audit passed\n" : "audit failed\n");
  return a.passed() ? kOk : kAuditFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Revenue-neutral network tariff and redistribution simulator"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Run configuration (JSON)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Seed for the synthetic population");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores); never changes output");
  app.add_flag("--strict", g.strict, "Fail on unmapped attribute combinations");

  auto* synth = app.add_subcommand("synth", "Generate attributes and metering CSVs");
  std::string spec_path;
  std::optional<std::int64_t> households;
  synth->add_option("--spec", spec_path, "Population spec (JSON)");
  synth->add_option("--households", households, "Override the household count");

  auto* validate = app.add_subcommand("validate", "Check the rule table and input data");
  auto* solve = app.add_subcommand("solve", "Print the tariff rates of every scenario");
  auto* sweep = app.add_subcommand("sweep", "Run all scenario x factor cells and audit them");
  auto* report = app.add_subcommand("report", "Run the sweep and write the report tables");
  auto* audit = app.add_subcommand("audit", "Re-verify a bill export against its summary");
  std::string bills, summary;
  audit->add_option("--bills", bills, "Bill export CSV");
  audit->add_option("--summary", summary, "Summary JSON");

  // Global options are accepted after the subcommand too.
  for (auto* sub : {synth, validate, solve, sweep, report, audit}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*synth) return cmd_synth(g, spec_path, households);
    if (*validate) return cmd_validate(g);
    if (*solve) return cmd_solve(g);
    if (*sweep) return run_and_write(g, false);
    if (*report) return run_and_write(g, true);
    if (*audit) return cmd_audit(g, bills, summary);
  } catch (const UnmappedCombination& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
  return kOk;
}
