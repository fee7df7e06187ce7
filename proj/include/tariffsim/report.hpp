#pragma once

// CSV/JSON renderings of a sweep, and re-verification of a bill export.

#include <iosfwd>
#include <string>
#include <vector>

#include "tariffsim/sweep.hpp"

namespace tariffsim {

/// Mean bill per group: base case, then one column per scenario@factor
/// for the report factors. DKK with one decimal.
std::string avg_bill_table_csv(const SweepResult& r);

/// Subscription / off-peak / peak percentages of each group's bill.
std::string component_share_table_csv(const SweepResult& r);

/// Percent change of each group's mean bill against its base case, for
/// every (scenario, factor) cell.
std::string delta_table_csv(const SweepResult& r);

/// Status x tech totals with margins, exact to the quantum.
std::string aggregate_table_csv(const SweepResult& r);

/// `group,status,tech,scenario,factor,subscription,offpeak,peak,total`;
/// one row per group and cell carrying the group's summed bills.
std::string bill_export_csv(const SweepResult& r);

std::string summary_json(const SweepResult& r);

std::string rates_table(const std::vector<TariffRates>& rates);

/// Writes the four tables, the bill export and the summary into `dir`.
std::vector<std::string> write_reports(const SweepResult& r, const std::string& dir);

struct ExportCellAudit {
  std::string scenario;
  std::string factor;
  Money sum;
  Money residual;
  std::size_t rows = 0;
  bool passed = false;
};

struct ExportAudit {
  Money target;
  std::int64_t households = 0;
  std::int64_t groups = 0;
  std::vector<ExportCellAudit> cells;
  std::vector<std::string> problems;
  bool passed() const;
};

/// Re-sums a bill export against the target in a summary file. Each row is
/// rendered to the cent, so the tolerance widens by half a cent per row.
ExportAudit audit_bill_export(std::istream& bills, std::istream& summary);

}  // namespace tariffsim
