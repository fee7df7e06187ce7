#include "tariffsim/report.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tariffsim/errors.hpp"

namespace tariffsim {

namespace {

using json = nlohmann::json;

std::string pct(Money part, Money whole) {
  if (whole.quanta == 0) return "0.00";
  return format_fixed(static_cast<i128>(part.quanta) * 100, whole.quanta, 2);
}

std::string group_cols(StatusTechGroup g) {
  return g.label() + "," + std::string(to_string(g.status)) + "," + std::string(to_string(g.tech));
}

std::string factor_text(const Fraction& f) { return f.to_decimal_string(1); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

json audit_json(const AuditResult& a) {
  return {{"residual_quanta", a.residual.quanta},
          {"residual_dkk", a.residual.to_dkk_string(4)},
          {"tolerance_quanta", a.tolerance_quanta()},
          {"passed", a.passed}};
}

}  // namespace

std::string avg_bill_table_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "group,status,tech,base";
  std::vector<const SweepCell*> cols;
  for (const auto& f : r.report_factors) {
    const std::size_t k = r.factor_index(f);
    for (std::size_t s = 0; s < r.scenarios.size(); ++s) {
      out << ',' << r.scenarios[s].id << '@' << factor_text(f);
      cols.push_back(&r.cell(s, k));
    }
  }
  out << '\n';
  for (const auto& g : populated_groups()) {
    out << group_cols(g);
    const GroupBill& b = r.base_of(g);
    out << ',' << (b.households ? b.average().total.to_dkk_string(1) : "");
    for (const SweepCell* c : cols) {
      const GroupBill& gb = c->of(g);
      out << ',' << (gb.households ? gb.average().total.to_dkk_string(1) : "");
    }
    out << '\n';
  }
  return out.str();
}

std::string component_share_table_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "group,status,tech,scenario,factor,subscription_pct,offpeak_pct,peak_pct\n";
  for (const auto& g : populated_groups()) {
    const GroupBill& b = r.base_of(g);
    out << group_cols(g) << ",base,1.0," << pct(b.subscription, b.total) << ',' << pct(b.offpeak, b.total) << ','
        << pct(b.peak, b.total) << '\n';
  }
  for (const auto& f : r.report_factors) {
    const std::size_t k = r.factor_index(f);
    for (std::size_t s = 0; s < r.scenarios.size(); ++s) {
      const SweepCell& c = r.cell(s, k);
      for (const auto& g : populated_groups()) {
        const GroupBill& b = c.of(g);
        out << group_cols(g) << ',' << r.scenarios[s].id << ',' << factor_text(f) << ','
            << pct(b.subscription, b.total) << ',' << pct(b.offpeak, b.total) << ',' << pct(b.peak, b.total)
            << '\n';
      }
    }
  }
  return out.str();
}

std::string delta_table_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "group,status,tech,scenario,factor,base_avg,avg,delta_pct\n";
  for (const auto& c : r.cells) {
    for (const auto& g : populated_groups()) {
      const GroupBill& b = c.of(g);
      const auto d = r.delta(c, g);
      out << group_cols(g) << ',' << r.scenarios[c.scenario].id << ',' << factor_text(c.factor) << ',';
      if (b.households) out << r.base_of(g).average().total.to_dkk_string(2) << ',' << b.average().total.to_dkk_string(2);
      else out << ',';
      out << ',' << (d ? d->percent_string(2) : "") << '\n';
    }
  }
  return out.str();
}

std::string aggregate_table_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "scenario,factor,status,NoTech,HP,EV,total\n";
  auto block = [&](const std::string& scenario, const std::string& factor, const GroupBills& bills) {
    std::array<Money, kTechCount> col{};
    Money grand;
    for (int s = 0; s < kStatusCount; ++s) {
      Money row;
      out << scenario << ',' << factor << ',' << to_string(static_cast<Status>(s));
      for (int t = 0; t < kTechCount; ++t) {
        const Money v = bills[static_cast<std::size_t>(s * kTechCount + t)].total;
        row += v;
        col[static_cast<std::size_t>(t)] += v;
        out << ',' << v.to_dkk_string(4);
      }
      grand += row;
      out << ',' << row.to_dkk_string(4) << '\n';
    }
    out << scenario << ',' << factor << ",Total";
    for (const Money& v : col) out << ',' << v.to_dkk_string(4);
    out << ',' << grand.to_dkk_string(4) << '\n';
  };
  block("base", "1.0", r.base);
  for (const auto& c : r.cells) block(r.scenarios[c.scenario].id, factor_text(c.factor), c.groups);
  return out.str();
}

std::string bill_export_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "group,status,tech,scenario,factor,subscription,offpeak,peak,total\n";
  for (const auto& c : r.cells) {
    for (const auto& g : populated_groups()) {
      const GroupBill& b = c.of(g);
      out << group_cols(g) << ',' << r.scenarios[c.scenario].id << ',' << factor_text(c.factor) << ','
          << b.subscription.to_dkk_string(2) << ',' << b.offpeak.to_dkk_string(2) << ',' << b.peak.to_dkk_string(2)
          << ',' << b.total.to_dkk_string(2) << '\n';
    }
  }
  return out.str();
}

std::string summary_json(const SweepResult& r) {
  json j;
  j["passed"] = r.passed;
  j["households"] = r.inputs.households;
  j["total_consumption_kwh"] = format_kwh(r.inputs.total_consumption);
  j["exclusions"] = r.exclusions;
  j["cleaning"] = {{"filled", r.filled}, {"rebuilt", r.rebuilt}};
  const Fraction s_base = r.inputs.base_share();
  j["base_case"] = {{"flat_rate_ore_per_kwh", r.inputs.flat_rate.to_ore_string(9)},
                    {"subscription_dkk", r.inputs.subscription.to_dkk_string(4)},
                    {"volumetric_revenue_dkk", r.inputs.volumetric_revenue().to_dkk_string(4)},
                    {"subscription_revenue_dkk", r.inputs.subscription_revenue().to_dkk_string(4)},
                    {"total_cost_dkk", r.inputs.total_cost().to_dkk_string(4)},
                    {"total_cost_quanta", r.inputs.total_cost().quanta},
                    {"volumetric_share", format_fixed(s_base.num, s_base.den, 9)},
                    {"audit", audit_json(r.base_audit)}};
  std::int64_t groups = 0;
  for (const auto& g : populated_groups()) {
    const auto n = r.census[static_cast<std::size_t>(g.index())];
    j["census"][g.label()] = n;
    groups += n > 0 ? 1 : 0;
  }
  j["populated_groups"] = groups;
  j["scenarios"] = json::array();
  for (std::size_t s = 0; s < r.scenarios.size(); ++s) {
    const auto& sc = r.scenarios[s];
    const auto& cal = r.calibrations[s];
    const auto& rates = r.cell(s, 0).rates;
    j["scenarios"].push_back({{"id", sc.id},
                              {"volumetric_share", format_fixed(rates.share.num, rates.share.den, 9)},
                              {"scale", format_fixed(rates.scale.num, rates.scale.den, 9)},
                              {"recovery_factor", sc.recovery_factor.to_decimal_string()},
                              {"peak_fraction", sc.peak_fraction.to_decimal_string()},
                              {"calibration", std::string(to_string(sc.mode))},
                              {"peak_hours", r.peak_hours[s].size()},
                              {"q_peak_kwh", format_kwh(cal.q_peak)},
                              {"q_base_kwh", format_kwh(cal.q_base)},
                              {"offpeak_rate_ore_per_kwh", cal.base.to_ore_string(6)},
                              {"peak_rate_ore_per_kwh", cal.peak.to_ore_string(6)},
                              {"effective_offpeak_ore_per_kwh", rates.base_eff.to_ore_string(6)},
                              {"effective_peak_ore_per_kwh", rates.peak_eff.to_ore_string(6)},
                              {"fee_dkk", rates.fee.to_dkk_string(4)}});
  }
  j["cells"] = json::array();
  for (const auto& c : r.cells) {
    json cell = {{"scenario", r.scenarios[c.scenario].id},
                 {"factor", factor_text(c.factor)},
                 {"x_incr", format_fixed(c.multipliers.x_incr.num, c.multipliers.x_incr.den, 9)},
                 {"audit", audit_json(c.audit)}};
    for (const auto& g : populated_groups()) {
      const GroupBill& b = c.of(g);
      cell["groups"][g.label()] = {{"households", b.households},
                                   {"subscription_quanta", b.subscription.quanta},
                                   {"offpeak_quanta", b.offpeak.quanta},
                                   {"peak_quanta", b.peak.quanta},
                                   {"total_quanta", b.total.quanta}};
    }
    j["cells"].push_back(std::move(cell));
  }
  return j.dump(2) + "\n";
}

std::string rates_table(const std::vector<TariffRates>& rates) {
  std::ostringstream out;
  out << "scenario,volumetric_share,scale,fee_dkk,offpeak_ore_per_kwh,peak_ore_per_kwh,"
         "effective_offpeak_ore_per_kwh,effective_peak_ore_per_kwh,peak_to_offpeak\n";
  for (const auto& r : rates) {
    out << r.scenario_id << ',' << format_fixed(r.share.num, r.share.den, 6) << ','
        << format_fixed(r.scale.num, r.scale.den, 6) << ',' << r.fee.to_dkk_string(4) << ','
        << r.calibration.base.to_ore_string(4) << ',' << r.calibration.peak.to_ore_string(4) << ','
        << r.base_eff.to_ore_string(4) << ',' << r.peak_eff.to_ore_string(4) << ','
        << format_fixed(r.calibration.peak.nano_ore_per_kwh, r.calibration.base.nano_ore_per_kwh, 4) << '\n';
  }
  return out.str();
}

std::vector<std::string> write_reports(const SweepResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> files{
      {"avg_bills.csv", avg_bill_table_csv(r)},     {"component_shares.csv", component_share_table_csv(r)},
      {"deltas.csv", delta_table_csv(r)},           {"aggregate.csv", aggregate_table_csv(r)},
      {"bills.csv", bill_export_csv(r)},            {"summary.json", summary_json(r)}};
  std::vector<std::string> written;
  for (const auto& [name, body] : files) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << body;
    written.push_back(path);
  }
  return written;
}

bool ExportAudit::passed() const {
  if (!problems.empty() || cells.empty()) return false;
  for (const auto& c : cells)
    if (!c.passed) return false;
  return true;
}

ExportAudit audit_bill_export(std::istream& bills, std::istream& summary) {
  ExportAudit a;
  json s;
  try {
    s = json::parse(summary);
    a.target = Money{s.at("base_case").at("total_cost_quanta").get<std::int64_t>()};
    a.households = s.at("households").get<std::int64_t>();
    a.groups = s.at("populated_groups").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad summary file: ") + e.what());
  }

  std::string line;
  if (!std::getline(bills, line) || line != "group,status,tech,scenario,factor,subscription,offpeak,peak,total")
    throw FormatError("unexpected bill export header");
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::size_t line_no = 1;
  while (std::getline(bills, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 9) {
      a.problems.push_back("line " + std::to_string(line_no) + ": expected 9 fields");
      continue;
    }
    Money parts[4];
    try {
      for (int i = 0; i < 4; ++i) parts[i] = Money::parse_dkk(f[5 + static_cast<std::size_t>(i)]);
    } catch (const Error& e) {
      a.problems.push_back("line " + std::to_string(line_no) + ": " + e.what());
      continue;
    }
    // Each line is rounded to the cent independently.
    const std::int64_t gap = (parts[0] + parts[1] + parts[2] - parts[3]).quanta;
    if (gap > 150 || gap < -150)
      a.problems.push_back("line " + std::to_string(line_no) + ": components do not add up to the total");
    const auto key = std::make_pair(f[3], f[4]);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, a.cells.size()).first;
      a.cells.push_back({f[3], f[4], Money{}, Money{}, 0, false});
    }
    auto& cell = a.cells[it->second];
    cell.sum += parts[3];
    ++cell.rows;
  }
  for (auto& c : a.cells) {
    c.residual = c.sum - a.target;
    const i128 twice = 2 * static_cast<i128>(c.residual.quanta < 0 ? -c.residual.quanta : c.residual.quanta);
    const i128 allowed = static_cast<i128>(a.households) + 2 * static_cast<i128>(a.groups) +
                         2 * 50 * static_cast<i128>(c.rows);
    c.passed = twice <= allowed;
  }
  return a;
}

}  // namespace tariffsim
