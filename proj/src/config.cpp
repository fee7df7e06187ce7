#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tariffsim/errors.hpp"
#include "tariffsim/sweep.hpp"

namespace tariffsim {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + std::string(what) + " '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [k, v] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("unknown field '" + k + "' in " + std::string(where));
}

// Numbers may be written as JSON numbers or decimal strings.
Fraction decimal(const json& v, std::string_view what) {
  try {
    if (v.is_string()) return Fraction::parse(v.get<std::string>());
    if (v.is_number_integer()) return Fraction(v.get<std::int64_t>(), 1);
    if (v.is_number()) {
      const std::string text = v.dump();
      if (text.find_first_of("eE") == std::string::npos) return Fraction::parse_decimal(text);
      return Fraction::from_double(v.get<double>());
    }
  } catch (const Error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
  throw ConfigError(std::string(what) + " must be a number");
}

std::string decimal_text(const json& v, std::string_view what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ConfigError(std::string(what) + " must be a number");
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

TariffScenario parse_scenario(const json& j) {
  check_keys(j, {"id", "volumetric_share", "recovery_factor", "peak_fraction", "calibration_mode"}, "scenario");
  TariffScenario s;
  s.id = j.at("id").get<std::string>();
  const json& share = j.at("volumetric_share");
  if (share.is_string() && share.get<std::string>() == "base") s.share_from_base = true;
  else s.volumetric_share = decimal(share, "volumetric_share");
  if (j.contains("recovery_factor")) s.recovery_factor = decimal(j["recovery_factor"], "recovery_factor");
  if (j.contains("peak_fraction")) s.peak_fraction = decimal(j["peak_fraction"], "peak_fraction");
  if (j.contains("calibration_mode")) s.mode = parse_calibration_mode(j["calibration_mode"].get<std::string>());
  return s;
}

std::vector<TariffScenario> scenarios_from(const json& j) {
  const json& list = j.is_object() ? j.at("scenarios") : j;
  if (!list.is_array()) throw ConfigError("scenarios must be a list");
  std::vector<TariffScenario> out;
  for (const auto& s : list) out.push_back(parse_scenario(s));
  if (out.empty()) throw ConfigError("scenario list is empty");
  return out;
}

std::vector<Fraction> factors_from(const json& j, std::string_view what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be a list");
  std::vector<Fraction> out;
  for (const auto& v : j) out.push_back(decimal(v, what));
  return out;
}

json fraction_json(const Fraction& f) { return f.to_decimal_string(); }

void apply_base_case(const json& b, RunConfig& c) {
  check_keys(b, {"flat_rate_ore_per_kwh", "subscription_dkk", "household_count", "total_consumption_kwh", "peak_energy_share"},
             "base_case");
  if (b.contains("flat_rate_ore_per_kwh"))
    c.flat_rate = Rate::parse_ore_per_kwh(decimal_text(b["flat_rate_ore_per_kwh"], "flat_rate_ore_per_kwh"));
  if (b.contains("subscription_dkk")) c.subscription = Money::parse_dkk(decimal_text(b["subscription_dkk"], "subscription_dkk"));
  if (b.contains("household_count")) c.pinned_households = b["household_count"].get<std::int64_t>();
  if (b.contains("total_consumption_kwh")) {
    const Fraction kwh = decimal(b["total_consumption_kwh"], "total_consumption_kwh");
    const i128 wh = static_cast<i128>(kwh.num) * 1000;
    if (wh % kwh.den != 0) throw ConfigError("total_consumption_kwh has more than 3 decimals");
    c.pinned_consumption = static_cast<Wh>(wh / kwh.den);
  }
  if (b.contains("peak_energy_share")) c.pinned_peak_share = decimal(b["peak_energy_share"], "peak_energy_share");
}

}  // namespace

std::vector<TariffScenario> parse_scenarios(std::string_view text) {
  try {
    return scenarios_from(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad scenario file: ") + e.what());
  }
}

std::vector<TariffScenario> load_scenarios(const std::string& path) {
  return parse_scenarios(read_file(path, "scenario file"));
}

RunConfig parse_run_config(std::string_view text, const std::string& base_dir) {
  RunConfig c;
  try {
    const json j = json::parse(text);
    check_keys(j,
               {"rules", "input", "synthetic", "scenarios", "factors", "report_factors", "base_case", "cleaning",
                "threads", "strict", "output_dir"},
               "run config");
    if (j.contains("rules")) c.rules_path = resolve(base_dir, j["rules"].get<std::string>());
    if (j.contains("input")) {
      const json& in = j["input"];
      check_keys(in, {"attributes", "metering", "year_hours"}, "input");
      c.attributes_path = resolve(base_dir, in.value("attributes", std::string()));
      c.metering_path = resolve(base_dir, in.value("metering", std::string()));
      c.year_hours = in.value("year_hours", c.year_hours);
    }
    if (j.contains("synthetic")) {
      const json& s = j["synthetic"];
      if (s.is_string()) c.synthetic = load_population_spec(resolve(base_dir, s.get<std::string>()));
      else if (s.is_object()) {
        // Inline overrides on top of the built-in spec.
        json merged = json::parse(population_spec_to_json(default_population_spec()));
        for (const auto& [k, v] : s.items()) merged[k] = v;
        c.synthetic = parse_population_spec(merged.dump());
      } else if (s.is_boolean() && s.get<bool>()) c.synthetic = default_population_spec();
    }
    if (j.contains("scenarios")) {
      const json& s = j["scenarios"];
      if (s.is_string()) {
        // A scenario file may also pin base-case inputs.
        const json file = json::parse(read_file(resolve(base_dir, s.get<std::string>()), "scenario file"));
        if (file.is_object()) {
          check_keys(file, {"scenarios", "base_case"}, "scenario file");
          if (file.contains("base_case")) apply_base_case(file["base_case"], c);
        }
        c.scenarios = scenarios_from(file);
      } else {
        c.scenarios = scenarios_from(s);
      }
    }
    if (j.contains("factors")) c.factors = factors_from(j["factors"], "factors");
    if (j.contains("report_factors")) c.report_factors = factors_from(j["report_factors"], "report_factors");
    if (j.contains("base_case")) apply_base_case(j["base_case"], c);
    if (j.contains("cleaning")) {
      check_keys(j["cleaning"], {"rebuild_threshold"}, "cleaning");
      c.rebuild_threshold = j["cleaning"].value("rebuild_threshold", c.rebuild_threshold);
    }
    c.threads = j.value("threads", c.threads);
    c.strict = j.value("strict", c.strict);
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad run config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  const std::string dir = fs::path(path).parent_path().string();
  return parse_run_config(read_file(path, "run config"), dir.empty() ? "." : dir);
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  if (!c.rules_path.empty()) j["rules"] = c.rules_path;
  if (!c.attributes_path.empty())
    j["input"] = {{"attributes", c.attributes_path}, {"metering", c.metering_path}, {"year_hours", c.year_hours}};
  if (c.synthetic) j["synthetic"] = json::parse(population_spec_to_json(*c.synthetic));
  j["scenarios"] = json::array();
  for (const auto& s : c.scenarios) {
    json o;
    o["id"] = s.id;
    o["volumetric_share"] = s.share_from_base ? json("base") : fraction_json(s.volumetric_share);
    o["recovery_factor"] = fraction_json(s.recovery_factor);
    o["peak_fraction"] = fraction_json(s.peak_fraction);
    o["calibration_mode"] = std::string(to_string(s.mode));
    j["scenarios"].push_back(o);
  }
  j["factors"] = json::array();
  for (const auto& f : c.factors) j["factors"].push_back(fraction_json(f));
  j["report_factors"] = json::array();
  for (const auto& f : c.report_factors) j["report_factors"].push_back(fraction_json(f));
  j["base_case"] = {{"flat_rate_ore_per_kwh", c.flat_rate.to_ore_string(9)},
                    {"subscription_dkk", c.subscription.to_dkk_string(4)}};
  if (c.pinned_households) j["base_case"]["household_count"] = *c.pinned_households;
  if (c.pinned_consumption) j["base_case"]["total_consumption_kwh"] = format_kwh(*c.pinned_consumption);
  if (c.pinned_peak_share) j["base_case"]["peak_energy_share"] = fraction_json(*c.pinned_peak_share);
  j["cleaning"] = {{"rebuild_threshold", c.rebuild_threshold}};
  j["threads"] = c.threads;
  j["strict"] = c.strict;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

}  // namespace tariffsim
