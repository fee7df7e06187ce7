#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tariffsim/domain.hpp"

namespace tariffsim {

namespace embedded {
extern const std::string_view kDefaultRules;
}

namespace {

using nlohmann::json;

template <typename E, typename Parse>
std::vector<E> parse_set(const json& node, const char* field, Parse parse) {
  std::vector<E> out;
  if (!node.contains(field)) return out;
  const json& v = node.at(field);
  if (v.is_string()) {
    out.push_back(parse(v.get<std::string>()));
  } else if (v.is_array()) {
    for (const auto& item : v) out.push_back(parse(item.get<std::string>()));
  } else {
    throw ConfigError(std::string("pattern field '") + field + "' must be a string or array");
  }
  return out;
}

AttributePattern parse_pattern(const json& node) {
  if (!node.is_object()) throw ConfigError("attribute pattern must be an object");
  static const std::array<std::string_view, 5> known{"dwelling", "area_band", "occupancy",
                                                     "income_band", "tech"};
  for (const auto& [key, _] : node.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown pattern field '" + key + "'");
  }
  AttributePattern p;
  p.dwelling = parse_set<Dwelling>(node, "dwelling", parse_dwelling);
  p.area_band = parse_set<AreaBand>(node, "area_band", parse_area_band);
  p.occupancy = parse_set<Occupancy>(node, "occupancy", parse_occupancy);
  p.income_band = parse_set<IncomeBand>(node, "income_band", parse_income_band);
  p.tech = parse_set<Tech>(node, "tech", parse_tech);
  return p;
}

template <typename E>
void put_set(json& node, const char* field, const std::vector<E>& values) {
  if (values.empty()) return;
  json arr = json::array();
  for (E v : values) arr.push_back(std::string(to_string(v)));
  node[field] = arr;
}

json pattern_to_json(const AttributePattern& p) {
  json node = json::object();
  put_set(node, "dwelling", p.dwelling);
  put_set(node, "area_band", p.area_band);
  put_set(node, "occupancy", p.occupancy);
  put_set(node, "income_band", p.income_band);
  put_set(node, "tech", p.tech);
  return node;
}

}  // namespace

ClassificationRuleTable parse_rule_table(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("rule table is not valid JSON: ") + e.what());
  }
  ClassificationRuleTable table;
  try {
    table.provenance = doc.value("provenance", "");
    if (doc.contains("admitted"))
      for (const auto& p : doc.at("admitted")) table.admitted.push_back(parse_pattern(p));
    if (doc.contains("excluded"))
      for (const auto& p : doc.at("excluded")) table.excluded.push_back(parse_pattern(p));
    if (!doc.contains("rules") || !doc.at("rules").is_array())
      throw ConfigError("rule table needs a 'rules' array");
    for (const auto& r : doc.at("rules")) {
      ClassificationRule rule;
      rule.label = r.value("label", "rule-" + std::to_string(table.rules.size()));
      rule.group.status = parse_status(r.at("status").get<std::string>());
      rule.group.tech = parse_tech(r.at("tech").get<std::string>());
      rule.pattern = parse_pattern(r.value("match", json::object()));
      if (rule.group.status == Status::Low && rule.group.tech == Tech::EV)
        throw ConfigError("rule '" + rule.label + "' targets Low/EV, which is not a valid group");
      table.rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed rule table: ") + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(std::string("malformed rule table: ") + e.what());
  }
  return table;
}

ClassificationRuleTable load_rule_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rule table '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_rule_table(buffer.str());
}

std::string rule_table_to_json(const ClassificationRuleTable& table) {
  json doc;
  doc["provenance"] = table.provenance;
  json admitted = json::array();
  for (const auto& p : table.admitted) admitted.push_back(pattern_to_json(p));
  json excluded = json::array();
  for (const auto& p : table.excluded) excluded.push_back(pattern_to_json(p));
  json rules = json::array();
  for (const auto& r : table.rules) {
    rules.push_back({{"label", r.label},
                     {"status", std::string(to_string(r.group.status))},
                     {"tech", std::string(to_string(r.group.tech))},
                     {"match", pattern_to_json(r.pattern)}});
  }
  doc["admitted"] = admitted;
  doc["excluded"] = excluded;
  doc["rules"] = rules;
  return doc.dump(2);
}

const ClassificationRuleTable& default_rule_table() {
  static const ClassificationRuleTable table = parse_rule_table(embedded::kDefaultRules);
  return table;
}

}  // namespace tariffsim
